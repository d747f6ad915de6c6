#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>

#include "vecmerge/align.hpp"
#include "vecmerge/classifier.hpp"
#include "vecmerge/dataset.hpp"
#include "vecmerge/embedding.hpp"

namespace vecmerge {

// Text formats. Readers throw ParseError with a 1-based line number;
// file-level helpers throw ValidationError when a path cannot be opened.
// Blank lines are ignored but still counted for line numbers.

struct EmbeddingLoadReport {
  std::size_t duplicates_dropped = 0;  // only when lowercasing
};

/// "<n> <d>" header, then n rows "<token> <d numbers>". With lowercase set,
/// tokens are ASCII-lowercased and the first of any colliding rows wins.
EmbeddingModel read_embeddings(std::istream& in, bool lowercase = false,
                               EmbeddingLoadReport* report = nullptr);
EmbeddingModel load_embeddings(const std::filesystem::path& path, bool lowercase = false,
                               EmbeddingLoadReport* report = nullptr);
void write_embeddings(std::ostream& out, const EmbeddingModel& model);
void save_embeddings(const EmbeddingModel& model, const std::filesystem::path& path);

/// fastText convention: "__label__<name> token token ...".
inline constexpr std::string_view kLabelPrefix = "__label__";
LabeledDataset read_labeled(std::istream& in);
LabeledDataset load_labeled(const std::filesystem::path& path);
void write_labeled(std::ostream& out, const LabeledDataset& data);
void save_labeled(const LabeledDataset& data, const std::filesystem::path& path);

/// Google analogy convention: ": category" headers followed by 4-token lines.
AnalogyDataset read_analogies(std::istream& in, bool lowercase = true);
AnalogyDataset load_analogies(const std::filesystem::path& path, bool lowercase = true);
void write_analogies(std::ostream& out, const AnalogyDataset& data);
void save_analogies(const AnalogyDataset& data, const std::filesystem::path& path);

/// "VMLC 1 <d> <K> <F> <ngram_order>", a tab-separated label line, K output
/// rows "<label> <d numbers>" and F feature rows "<key> <d numbers>".
LinearTextClassifier read_classifier(std::istream& in);
LinearTextClassifier load_classifier(const std::filesystem::path& path);
void write_classifier(std::ostream& out, const LinearTextClassifier& model);
void save_classifier(const LinearTextClassifier& model, const std::filesystem::path& path);

/// Whether the file starts with the classifier magic word.
bool is_classifier_file(const std::filesystem::path& path);

/// "<d> <method>" header followed by d rows of d numbers.
OrthogonalMap read_map(std::istream& in);
OrthogonalMap load_map(const std::filesystem::path& path);
void write_map(std::ostream& out, const OrthogonalMap& map);
void save_map(const OrthogonalMap& map, const std::filesystem::path& path);

}  // namespace vecmerge
