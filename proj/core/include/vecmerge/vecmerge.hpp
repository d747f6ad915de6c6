#pragma once

#include "vecmerge/align.hpp"
#include "vecmerge/classifier.hpp"
#include "vecmerge/dataset.hpp"
#include "vecmerge/embedding.hpp"
#include "vecmerge/errors.hpp"
#include "vecmerge/eval.hpp"
#include "vecmerge/linalg.hpp"
#include "vecmerge/merge.hpp"
#include "vecmerge/model_io.hpp"
#include "vecmerge/random.hpp"
#include "vecmerge/text.hpp"
