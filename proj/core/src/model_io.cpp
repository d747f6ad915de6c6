#include "vecmerge/model_io.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <unordered_map>
#include <unordered_set>

#include "vecmerge/errors.hpp"
#include "vecmerge/text.hpp"

namespace vecmerge {

namespace {

// Yields non-blank lines with their 1-based line numbers.
class LineReader {
 public:
  explicit LineReader(std::istream& in) : in_(in) {}

  bool next() {
    while (std::getline(in_, line_)) {
      ++number_;
      fields_ = split_whitespace(line_);
      if (!fields_.empty()) return true;
    }
    return false;
  }

  const std::string& line() const { return line_; }
  const std::vector<std::string_view>& fields() const { return fields_; }
  std::size_t number() const { return number_; }

  [[noreturn]] void fail(const std::string& what) const { throw ParseError(what, number_); }

 private:
  std::istream& in_;
  std::string line_;
  std::vector<std::string_view> fields_;
  std::size_t number_ = 0;
};

void parse_values(const LineReader& reader, std::size_t first, Index dim, Eigen::Ref<RowVector> out) {
  const auto& fields = reader.fields();
  for (Index c = 0; c < dim; ++c) {
    const std::string_view field = fields[first + static_cast<std::size_t>(c)];
    const auto value = parse_double(field);
    if (!value) reader.fail("invalid number '" + std::string(field) + "'");
    if (!std::isfinite(*value)) reader.fail("non-finite value");
    out[c] = *value;
  }
}

void check_arity(const LineReader& reader, Index dim, const char* what) {
  const std::size_t expected = static_cast<std::size_t>(dim) + 1;
  if (reader.fields().size() != expected) {
    reader.fail(std::string(what) + " row has " + std::to_string(reader.fields().size()) +
                " fields, expected " + std::to_string(expected));
  }
}

Index parse_count(const LineReader& reader, std::string_view field, const char* what,
                  long long minimum) {
  const auto value = parse_integer(field);
  if (!value || *value < minimum) {
    reader.fail(std::string("malformed header: invalid ") + what + " '" + std::string(field) + "'");
  }
  return static_cast<Index>(*value);
}

void append_row(std::string& out, std::string_view key, const Eigen::Ref<const RowVector>& row) {
  out.append(key);
  for (Index c = 0; c < row.size(); ++c) {
    out.push_back(' ');
    append_double(out, row[c]);
  }
  out.push_back('\n');
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open '" + path.string() + "' for reading");
  return in;
}

template <typename Writer>
void write_file(const std::filesystem::path& path, Writer&& writer) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ValidationError("cannot open '" + path.string() + "' for writing");
  writer(out);
  out.flush();
  if (!out) throw ValidationError("failed writing '" + path.string() + "'");
}

}  // namespace

EmbeddingModel read_embeddings(std::istream& in, bool lowercase, EmbeddingLoadReport* report) {
  LineReader reader(in);
  if (!reader.next()) throw ParseError("missing header", reader.number() + 1);
  if (reader.fields().size() != 2) reader.fail("malformed header, expected '<count> <dim>'");
  const Index count = parse_count(reader, reader.fields()[0], "count", 0);
  const Index dim = parse_count(reader, reader.fields()[1], "dimension", 1);

  std::vector<std::string> vocab;
  Matrix vectors(count, dim);
  std::unordered_set<std::string> seen;
  std::size_t dropped = 0;
  Index rows_read = 0;
  while (reader.next()) {
    if (rows_read == count) {
      reader.fail("more rows than the " + std::to_string(count) + " declared in the header");
    }
    check_arity(reader, dim, "embedding");
    ++rows_read;
    std::string token(reader.fields()[0]);
    if (lowercase) token = ascii_lower(token);
    RowVector values(dim);
    parse_values(reader, 1, dim, values);
    if (!seen.insert(token).second) {
      if (!lowercase) reader.fail("duplicate token '" + token + "'");
      ++dropped;
      continue;
    }
    vectors.row(static_cast<Index>(vocab.size())) = values;
    vocab.push_back(std::move(token));
  }
  if (rows_read != count) {
    throw ParseError("expected " + std::to_string(count) + " rows, found " +
                         std::to_string(rows_read),
                     reader.number() + 1);
  }
  vectors.conservativeResize(static_cast<Index>(vocab.size()), dim);
  if (report) report->duplicates_dropped = dropped;
  return EmbeddingModel(std::move(vocab), std::move(vectors));
}

EmbeddingModel load_embeddings(const std::filesystem::path& path, bool lowercase,
                               EmbeddingLoadReport* report) {
  auto in = open_input(path);
  return read_embeddings(in, lowercase, report);
}

void write_embeddings(std::ostream& out, const EmbeddingModel& model) {
  std::string buffer = std::to_string(model.size()) + ' ' + std::to_string(model.dim()) + '\n';
  for (Index i = 0; i < model.size(); ++i) append_row(buffer, model.token(i), model.row(i));
  out << buffer;
}

void save_embeddings(const EmbeddingModel& model, const std::filesystem::path& path) {
  write_file(path, [&](std::ostream& out) { write_embeddings(out, model); });
}

LabeledDataset read_labeled(std::istream& in) {
  LineReader reader(in);
  std::vector<Document> documents;
  while (reader.next()) {
    const std::string_view head = reader.fields()[0];
    if (head.substr(0, kLabelPrefix.size()) != kLabelPrefix || head.size() == kLabelPrefix.size()) {
      reader.fail("line does not start with a " + std::string(kLabelPrefix) + "<name> label");
    }
    if (reader.fields().size() < 2) reader.fail("empty document");
    Document doc;
    doc.label = std::string(head.substr(kLabelPrefix.size()));
    for (std::size_t i = 1; i < reader.fields().size(); ++i) {
      doc.tokens.emplace_back(reader.fields()[i]);
    }
    documents.push_back(std::move(doc));
  }
  return LabeledDataset(std::move(documents));
}

LabeledDataset load_labeled(const std::filesystem::path& path) {
  auto in = open_input(path);
  return read_labeled(in);
}

void write_labeled(std::ostream& out, const LabeledDataset& data) {
  std::string buffer;
  for (const auto& doc : data.documents()) {
    buffer.append(kLabelPrefix).append(doc.label);
    for (const auto& token : doc.tokens) buffer.append(" ").append(token);
    buffer.push_back('\n');
  }
  out << buffer;
}

void save_labeled(const LabeledDataset& data, const std::filesystem::path& path) {
  write_file(path, [&](std::ostream& out) { write_labeled(out, data); });
}

AnalogyDataset read_analogies(std::istream& in, bool lowercase) {
  LineReader reader(in);
  std::vector<AnalogyCategory> categories;
  std::unordered_set<std::string> names;
  while (reader.next()) {
    const auto& fields = reader.fields();
    if (fields[0].front() == ':') {
      std::string name(fields[0].substr(1));
      for (std::size_t i = 1; i < fields.size(); ++i) {
        if (!name.empty()) name.push_back(' ');
        name.append(fields[i]);
      }
      if (name.empty()) reader.fail("category header without a name");
      if (!names.insert(name).second) reader.fail("duplicate category '" + name + "'");
      categories.push_back({std::move(name), {}});
      continue;
    }
    if (categories.empty()) reader.fail("question before any ': category' header");
    if (fields.size() != 4) {
      reader.fail("analogy question has " + std::to_string(fields.size()) +
                  " tokens, expected 4");
    }
    AnalogyQuestion question;
    for (std::size_t i = 0; i < 4; ++i) {
      question.words[i] = lowercase ? ascii_lower(fields[i]) : std::string(fields[i]);
    }
    categories.back().questions.push_back(std::move(question));
  }
  return AnalogyDataset(std::move(categories));
}

AnalogyDataset load_analogies(const std::filesystem::path& path, bool lowercase) {
  auto in = open_input(path);
  return read_analogies(in, lowercase);
}

void write_analogies(std::ostream& out, const AnalogyDataset& data) {
  std::string buffer;
  for (const auto& category : data.categories()) {
    buffer.append(": ").append(category.name).push_back('\n');
    for (const auto& q : category.questions) {
      buffer.append(q.words[0]).append(" ").append(q.words[1]).append(" ");
      buffer.append(q.words[2]).append(" ").append(q.words[3]).push_back('\n');
    }
  }
  out << buffer;
}

void save_analogies(const AnalogyDataset& data, const std::filesystem::path& path) {
  write_file(path, [&](std::ostream& out) { write_analogies(out, data); });
}

namespace {
constexpr std::string_view kClassifierMagic = "VMLC";
}

LinearTextClassifier read_classifier(std::istream& in) {
  LineReader reader(in);
  if (!reader.next()) throw ParseError("missing classifier header", reader.number() + 1);
  const auto& head = reader.fields();
  if (head.size() != 6 || head[0] != kClassifierMagic) {
    reader.fail("malformed header, expected 'VMLC 1 <dim> <labels> <features> <ngram_order>'");
  }
  if (head[1] != "1") reader.fail("unsupported classifier format version '" + std::string(head[1]) + "'");
  const Index dim = parse_count(reader, head[2], "dimension", 1);
  const Index label_count = parse_count(reader, head[3], "label count", 2);
  const Index feature_count = parse_count(reader, head[4], "feature count", 0);
  const Index order = parse_count(reader, head[5], "n-gram order", 1);
  if (order > 2) reader.fail("malformed header: n-gram order must be 1 or 2");

  LinearTextClassifier model;
  model.ngram_order = static_cast<int>(order);
  if (!reader.next()) throw ParseError("missing label line", reader.number() + 1);
  if (static_cast<Index>(reader.fields().size()) != label_count) {
    reader.fail("label line lists " + std::to_string(reader.fields().size()) +
                " labels, header declares " + std::to_string(label_count));
  }
  for (const auto label : reader.fields()) model.labels.emplace_back(label);

  model.outputs.resize(label_count, dim);
  for (Index k = 0; k < label_count; ++k) {
    if (!reader.next()) throw ParseError("missing output row", reader.number() + 1);
    check_arity(reader, dim, "output");
    if (reader.fields()[0] != model.labels[static_cast<std::size_t>(k)]) {
      reader.fail("output row label '" + std::string(reader.fields()[0]) + "' does not match '" +
                  model.labels[static_cast<std::size_t>(k)] + "'");
    }
    parse_values(reader, 1, dim, model.outputs.row(k));
  }

  std::vector<std::string> keys;
  Matrix vectors(feature_count, dim);
  std::unordered_set<std::string> seen;
  for (Index f = 0; f < feature_count; ++f) {
    if (!reader.next()) throw ParseError("missing feature row", reader.number() + 1);
    check_arity(reader, dim, "feature");
    std::string key(reader.fields()[0]);
    if (!seen.insert(key).second) reader.fail("duplicate feature '" + key + "'");
    parse_values(reader, 1, dim, vectors.row(f));
    keys.push_back(std::move(key));
  }
  if (reader.next()) reader.fail("unexpected content after the last feature row");

  model.features = EmbeddingModel(std::move(keys), std::move(vectors));
  try {
    model.validate();
  } catch (const ValidationError& e) {
    throw ParseError(e.what(), 2);
  }
  return model;
}

LinearTextClassifier load_classifier(const std::filesystem::path& path) {
  auto in = open_input(path);
  return read_classifier(in);
}

void write_classifier(std::ostream& out, const LinearTextClassifier& model) {
  model.validate();
  std::string buffer = std::string(kClassifierMagic) + " 1 " + std::to_string(model.dim()) + ' ' +
                       std::to_string(model.label_count()) + ' ' +
                       std::to_string(model.features.size()) + ' ' +
                       std::to_string(model.ngram_order) + '\n';
  for (std::size_t k = 0; k < model.labels.size(); ++k) {
    if (k) buffer.push_back('\t');
    buffer.append(model.labels[k]);
  }
  buffer.push_back('\n');
  for (Index k = 0; k < model.label_count(); ++k) {
    append_row(buffer, model.labels[static_cast<std::size_t>(k)], model.outputs.row(k));
  }
  for (Index f = 0; f < model.features.size(); ++f) {
    append_row(buffer, model.features.token(f), model.features.row(f));
  }
  out << buffer;
}

void save_classifier(const LinearTextClassifier& model, const std::filesystem::path& path) {
  write_file(path, [&](std::ostream& out) { write_classifier(out, model); });
}

bool is_classifier_file(const std::filesystem::path& path) {
  auto in = open_input(path);
  std::string word;
  in >> word;
  return word == kClassifierMagic;
}

OrthogonalMap read_map(std::istream& in) {
  LineReader reader(in);
  if (!reader.next()) throw ParseError("missing map header", reader.number() + 1);
  if (reader.fields().size() != 2) reader.fail("malformed header, expected '<dim> <method>'");
  const Index dim = parse_count(reader, reader.fields()[0], "dimension", 1);
  OrthogonalMap map;
  try {
    map.method = parse_align_method(reader.fields()[1]);
  } catch (const ValidationError& e) {
    reader.fail(e.what());
  }
  map.matrix.resize(dim, dim);
  for (Index r = 0; r < dim; ++r) {
    if (!reader.next()) throw ParseError("missing map row", reader.number() + 1);
    if (static_cast<Index>(reader.fields().size()) != dim) {
      reader.fail("map row has " + std::to_string(reader.fields().size()) + " values, expected " +
                  std::to_string(dim));
    }
    parse_values(reader, 0, dim, map.matrix.row(r));
  }
  if (reader.next()) reader.fail("unexpected content after the last map row");
  return map;
}

OrthogonalMap load_map(const std::filesystem::path& path) {
  auto in = open_input(path);
  return read_map(in);
}

void write_map(std::ostream& out, const OrthogonalMap& map) {
  std::string buffer = std::to_string(map.dim()) + ' ' + std::string(to_string(map.method)) + '\n';
  for (Index r = 0; r < map.dim(); ++r) {
    for (Index c = 0; c < map.dim(); ++c) {
      if (c) buffer.push_back(' ');
      append_double(buffer, map.matrix(r, c));
    }
    buffer.push_back('\n');
  }
  out << buffer;
}

void save_map(const OrthogonalMap& map, const std::filesystem::path& path) {
  write_file(path, [&](std::ostream& out) { write_map(out, map); });
}

}  // namespace vecmerge
