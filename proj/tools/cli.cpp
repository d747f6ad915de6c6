#include "cli.hpp"

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <sstream>

#include "vecmerge/vecmerge.hpp"

namespace vecmerge::cli {

namespace {

struct AlignArgs {
  std::string old_path;
  std::string new_path;
  std::string method = "rcsls";
  std::string pairs = "all-common";
  std::string norm_source = "new";
  bool normalize = false;
  bool lowercase = false;
  Index k = 10;
  double lr = 1.0;
  int epochs = 10;
  Index batch = 0;
  std::string init = "procrustes";
  std::uint64_t seed = 0;
  std::string out;
};

struct MergeArgs {
  std::string old_path;
  std::string new_path;
  std::string map_path;
  double alpha = 0.5;
  std::string out;
};

struct TrainArgs {
  std::string input;
  std::string init_from;
  std::string out;
  Index dim = 10;
  int epochs = 20;
  double lr = 0.5;
  int ngrams = 2;
  Index min_count = 1;
  std::uint64_t seed = 0;
};

struct PredictArgs {
  std::string model;
  std::string other;
  std::string input;
  std::string out = "-";
};

struct AnalogyArgs {
  std::string model;
  std::string questions;
  std::string banned;
  std::string name = "model";
  bool verbose = false;
  bool keep_case = false;
  std::string out = "-";
};

struct AccuracyArgs {
  std::string model;
  std::string data;
  std::string name = "model";
  std::string split = "test";
  std::string out = "-";
};

struct SplitArgs {
  std::string questions;
  std::string banned_in;
  double fraction = 0.1;
  std::uint64_t seed = 0;
  bool keep_case = false;
  std::string banned_out;
  std::string oov_out;
  std::string in_vocab_out;
};

struct ExperimentArgs {
  std::string shard0;
  std::string shard1;
  std::string test;
  Index dim = 10;
  int epochs = 20;
  double lr = 0.5;
  int ngrams = 2;
  Index min_count = 1;
  std::uint64_t seed = 0;
  Index k = 10;
  double rcsls_lr = 1.0;
  int rcsls_epochs = 10;
  std::string pairs = "top-norm:1000";
  double alpha = 0.5;
  std::string out = "-";
  std::string merged_out;
};

// Writes to stdout for "-", otherwise to the named file.
template <typename Writer>
void emit(const std::string& path, std::ostream& out, Writer&& writer) {
  if (path == "-" || path.empty()) {
    writer(out);
    return;
  }
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw ValidationError("cannot open '" + path + "' for writing");
  writer(file);
  file.flush();
  if (!file) throw ValidationError("failed writing '" + path + "'");
}

std::vector<std::vector<std::string>> read_documents(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open '" + path + "' for reading");
  std::vector<std::vector<std::string>> docs;
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> tokens;
    for (const auto field : split_whitespace(line)) {
      if (field.substr(0, kLabelPrefix.size()) == kLabelPrefix) continue;
      tokens.emplace_back(field);
    }
    if (!split_whitespace(line).empty()) docs.push_back(std::move(tokens));
  }
  return docs;
}

TokenSet read_token_set(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open '" + path + "' for reading");
  TokenSet tokens;
  std::string word;
  while (in >> word) tokens.insert(ascii_lower(word));
  return tokens;
}

void echo_config(std::ostream& err, const CLI::App& sub) {
  err << "vecmerge " << sub.get_name();
  for (const CLI::Option* opt : sub.get_options()) {
    if (opt->get_name() == "--help") continue;
    std::string value;
    if (opt->get_expected_max() == 0) {
      value = opt->count() ? "true" : "false";
    } else if (opt->count()) {
      for (const auto& r : opt->results()) value += (value.empty() ? "" : ",") + r;
    } else {
      value = opt->get_default_str();
    }
    err << ' ' << opt->get_name() << '=' << value;
  }
  err << '\n';
}

int cmd_align(const AlignArgs& a, std::ostream& err) {
  const AlignMethod method = parse_align_method(a.method);
  PairStrategy strategy = PairStrategy::parse(a.pairs);
  if (a.norm_source == "old") {
    strategy.norm_source = NormSource::old_model;
  } else if (a.norm_source != "new") {
    throw ValidationError("--norm-source must be 'new' or 'old'");
  }

  PairedVectors pairs;
  if (is_classifier_file(a.old_path)) {
    pairs = select_training_pairs(load_classifier(a.old_path), load_classifier(a.new_path), strategy);
  } else {
    pairs = select_training_pairs(load_embeddings(a.old_path, a.lowercase),
                                  load_embeddings(a.new_path, a.lowercase), strategy);
  }
  err << "pairs: " << pairs.size() << " in dimension " << pairs.dim() << '\n';
  if (pairs.size() < pairs.dim()) {
    err << "warning: fewer pairs than dimensions, the map is under-determined\n";
  }

  OrthogonalMap map;
  switch (method) {
    case AlignMethod::least_squares:
      map = least_squares_align(pairs, a.normalize);
      break;
    case AlignMethod::procrustes:
      map = procrustes_align(pairs, a.normalize);
      break;
    case AlignMethod::rcsls: {
      RcslsConfig config;
      config.k = a.k;
      config.epochs = a.epochs;
      config.learning_rate = a.lr;
      config.batch_size = a.batch;
      config.seed = a.seed;
      if (a.init == "identity") {
        config.init = RcslsInit::identity;
      } else if (a.init != "procrustes") {
        throw ValidationError("--init must be 'identity' or 'procrustes'");
      }
      map = rcsls_align(pairs, config, [&err](const RcslsEpoch& e) {
        err << "epoch " << e.epoch << " loss " << format_double(e.loss) << " lr "
            << format_double(e.learning_rate) << (e.improved ? "" : " (kept best)") << '\n';
      });
      err << "rcsls loss: " << format_double(*map.final_loss) << '\n';
      break;
    }
  }
  if (map.non_unique) err << "warning: the procrustes minimizer is not unique\n";
  if (method != AlignMethod::least_squares) {
    err << "orthogonality error: " << format_double(orthogonality_error(map.matrix)) << '\n';
  }
  save_map(map, a.out);
  return kOk;
}

void report_merge(std::ostream& err, const MergeReport& report) {
  err << "merged: " << report.new_only << " new-only, " << report.shared << " shared, "
      << report.old_only << " old-only\n";
  if (report.non_orthogonal_map) {
    err << "warning: the map is not orthogonal; mapped norms are not preserved\n";
  }
}

int cmd_merge_vectors(const MergeArgs& a, std::ostream& err) {
  MergeReport report;
  const auto merged = merge_embeddings(load_embeddings(a.old_path), load_embeddings(a.new_path),
                                       load_map(a.map_path), MergeConfig{a.alpha}, &report);
  report_merge(err, report);
  save_embeddings(merged, a.out);
  return kOk;
}

int cmd_merge_classifiers(const MergeArgs& a, std::ostream& err) {
  MergeReport report;
  const auto merged = merge_classifiers(load_classifier(a.old_path), load_classifier(a.new_path),
                                        load_map(a.map_path), MergeConfig{a.alpha}, &report);
  report_merge(err, report);
  save_classifier(merged, a.out);
  return kOk;
}

int cmd_train(const TrainArgs& a, std::ostream& err) {
  const LabeledDataset data = load_labeled(a.input);
  TrainConfig config;
  config.dim = a.dim;
  config.epochs = a.epochs;
  config.learning_rate = a.lr;
  config.ngram_order = a.ngrams;
  config.min_count = a.min_count;
  config.seed = a.seed;
  LinearTextClassifier model;
  if (a.init_from.empty()) {
    model = train(data, config);
  } else {
    const LinearTextClassifier init = load_classifier(a.init_from);
    model = train(data, config, &init);
  }
  err << "trained on " << data.size() << " documents: " << model.features.size() << " features, "
      << model.label_count() << " labels, training accuracy "
      << format_double(eval_accuracy(model, data)) << '\n';
  save_classifier(model, a.out);
  return kOk;
}

int cmd_predict(const PredictArgs& a, std::ostream& out) {
  const LinearTextClassifier model = load_classifier(a.model);
  const auto docs = read_documents(a.input);
  emit(a.out, out, [&](std::ostream& sink) {
    std::string text;
    for (const auto& doc : docs) {
      const Vector probs = predict_proba(doc, model);
      const Index best = argmax(label_scores(doc, model));
      text.append(model.labels[static_cast<std::size_t>(best)]).push_back('\t');
      append_double(text, probs[best]);
      text.push_back('\n');
    }
    sink << text;
  });
  return kOk;
}

int cmd_vote(const PredictArgs& a, std::ostream& out) {
  const LinearTextClassifier first = load_classifier(a.model);
  const LinearTextClassifier second = load_classifier(a.other);
  const auto docs = read_documents(a.input);
  emit(a.out, out, [&](std::ostream& sink) {
    std::string text;
    for (const auto& doc : docs) text.append(vote_ensemble(doc, first, second)).push_back('\n');
    sink << text;
  });
  return kOk;
}

int cmd_eval_analogy(const AnalogyArgs& a, std::ostream& out) {
  const EmbeddingModel model = load_embeddings(a.model, !a.keep_case);
  const AnalogyDataset data = load_analogies(a.questions, !a.keep_case);
  std::vector<ReportRow> rows;
  const auto add = [&](const std::string& split, const AnalogyDataset& part) {
    const auto score = analogy_rows(a.name, split, eval_analogy(model, part), a.verbose);
    rows.insert(rows.end(), score.begin(), score.end());
  };
  if (!a.banned.empty()) {
    const AnalogySplit split = split_analogy(data, read_token_set(a.banned));
    add("out-of-vocab", split.out_of_vocab);
    add("in-vocab", split.in_vocab);
  }
  add("all", data);
  emit(a.out, out, [&](std::ostream& sink) { write_report(sink, rows); });
  return kOk;
}

int cmd_eval_accuracy(const AccuracyArgs& a, std::ostream& out) {
  const double accuracy = eval_accuracy(load_classifier(a.model), load_labeled(a.data));
  emit(a.out, out, [&](std::ostream& sink) { write_report(sink, {{a.name, a.split, accuracy}}); });
  return kOk;
}

int cmd_split_analogy(const SplitArgs& a, std::ostream& out, std::ostream& err) {
  const AnalogyDataset data = load_analogies(a.questions, !a.keep_case);
  const TokenSet banned =
      a.banned_in.empty() ? sample_banned(data, a.fraction, a.seed) : read_token_set(a.banned_in);
  const AnalogySplit split = split_analogy(data, banned);
  err << "banned words: " << banned.size() << ", out-of-vocab questions: "
      << split.out_of_vocab.question_count()
      << ", in-vocab questions: " << split.in_vocab.question_count() << '\n';
  save_analogies(split.out_of_vocab, a.oov_out);
  save_analogies(split.in_vocab, a.in_vocab_out);
  emit(a.banned_out, out, [&](std::ostream& sink) {
    std::string text;
    for (const auto& word : banned) text.append(word).push_back('\n');
    sink << text;
  });
  return kOk;
}

int cmd_experiment(const ExperimentArgs& a, std::ostream& out, std::ostream& err) {
  ExperimentConfig config;
  config.train.dim = a.dim;
  config.train.epochs = a.epochs;
  config.train.learning_rate = a.lr;
  config.train.ngram_order = a.ngrams;
  config.train.min_count = a.min_count;
  config.train.seed = a.seed;
  config.rcsls.k = a.k;
  config.rcsls.learning_rate = a.rcsls_lr;
  config.rcsls.epochs = a.rcsls_epochs;
  config.rcsls.seed = a.seed;
  config.pairs = PairStrategy::parse(a.pairs);
  config.merge.alpha = a.alpha;

  const ExperimentResult result =
      run_merge_experiment(load_labeled(a.shard0), load_labeled(a.shard1), load_labeled(a.test), config);
  err << "rcsls loss: " << format_double(result.map.final_loss.value_or(0.0)) << '\n';
  emit(a.out, out, [&](std::ostream& sink) { write_report(sink, result.rows); });
  if (!a.merged_out.empty()) save_classifier(result.merged, a.merged_out);
  return kOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Align and merge word-vector models and low-rank text classifiers", "vecmerge"};
  app.require_subcommand(1);
  app.option_defaults()->always_capture_default();

  AlignArgs align;
  auto* align_cmd = app.add_subcommand("align", "Fit a map from an old model into a new model's space");
  align_cmd->add_option("--old", align.old_path, "Old model (embeddings or classifier)")->required();
  align_cmd->add_option("--new", align.new_path, "New model (same kind as --old)")->required();
  align_cmd->add_option("--method", align.method, "lsq | procrustes | rcsls");
  align_cmd->add_option("--pairs", align.pairs, "all-common | top-norm:N");
  align_cmd->add_option("--norm-source", align.norm_source, "Model whose norms rank top-norm pairs: new | old");
  align_cmd->add_flag("--normalize", align.normalize, "Unit-normalize pairs for lsq/procrustes");
  align_cmd->add_flag("--lowercase", align.lowercase, "Lowercase embedding tokens on load");
  align_cmd->add_option("--k", align.k, "RCSLS neighborhood size");
  align_cmd->add_option("--lr", align.lr, "RCSLS learning rate");
  align_cmd->add_option("--epochs", align.epochs, "RCSLS epochs");
  align_cmd->add_option("--batch", align.batch, "RCSLS batch size (0 = full batch)");
  align_cmd->add_option("--init", align.init, "RCSLS initialization: procrustes | identity");
  align_cmd->add_option("--seed", align.seed, "Random seed");
  align_cmd->add_option("--out", align.out, "Output map file")->required();

  MergeArgs merge_vec;
  auto* merge_vec_cmd = app.add_subcommand("merge-vectors", "Merge two embedding files through a map");
  MergeArgs merge_clf;
  auto* merge_clf_cmd = app.add_subcommand("merge-classifiers", "Merge two classifiers through a map");
  for (auto [cmd, args] : {std::pair{merge_vec_cmd, &merge_vec}, std::pair{merge_clf_cmd, &merge_clf}}) {
    cmd->add_option("--old", args->old_path, "Old model")->required();
    cmd->add_option("--new", args->new_path, "New model")->required();
    cmd->add_option("--map", args->map_path, "Map file from 'align'")->required();
    cmd->add_option("--alpha", args->alpha, "Weight of the new model on shared keys")
        ->check(CLI::Range(0.0, 1.0));
    cmd->add_option("--out", args->out, "Output model")->required();
  }

  TrainArgs train_args;
  auto* train_cmd = app.add_subcommand("train", "Train a linear text classifier");
  train_cmd->add_option("--input", train_args.input, "Labeled training data")->required();
  train_cmd->add_option("--out", train_args.out, "Output classifier")->required();
  train_cmd->add_option("--init-from", train_args.init_from, "Warm-start features from this classifier");
  train_cmd->add_option("--dim", train_args.dim, "Hidden dimension");
  train_cmd->add_option("--epochs", train_args.epochs, "Training epochs");
  train_cmd->add_option("--lr", train_args.lr, "Initial learning rate");
  train_cmd->add_option("--ngrams", train_args.ngrams, "1 = words, 2 = words and bigrams");
  train_cmd->add_option("--min-count", train_args.min_count, "Minimum feature count");
  train_cmd->add_option("--seed", train_args.seed, "Random seed");

  PredictArgs predict_args;
  auto* predict_cmd = app.add_subcommand("predict", "Predict the label of each input line");
  predict_cmd->add_option("--model", predict_args.model, "Classifier")->required();
  predict_cmd->add_option("--input", predict_args.input, "One document per line")->required();
  predict_cmd->add_option("--out", predict_args.out, "Output file or - for stdout");

  PredictArgs vote_args;
  auto* vote_cmd = app.add_subcommand("vote", "Two-classifier vote on each input line");
  vote_cmd->add_option("--a", vote_args.model, "First classifier (wins exact ties)")->required();
  vote_cmd->add_option("--b", vote_args.other, "Second classifier")->required();
  vote_cmd->add_option("--input", vote_args.input, "One document per line")->required();
  vote_cmd->add_option("--out", vote_args.out, "Output file or - for stdout");

  AnalogyArgs analogy;
  auto* analogy_cmd = app.add_subcommand("eval-analogy", "3CosAdd word-analogy accuracy");
  analogy_cmd->add_option("--model", analogy.model, "Embedding file")->required();
  analogy_cmd->add_option("--questions", analogy.questions, "Analogy file")->required();
  analogy_cmd->add_option("--banned", analogy.banned, "Banned word list; adds out-of-vocab/in-vocab rows");
  analogy_cmd->add_option("--name", analogy.name, "Variant name in the report");
  analogy_cmd->add_flag("--verbose", analogy.verbose, "Per-category rows");
  analogy_cmd->add_flag("--keep-case", analogy.keep_case, "Do not lowercase tokens");
  analogy_cmd->add_option("--out", analogy.out, "Report file or - for stdout");

  AccuracyArgs accuracy;
  auto* accuracy_cmd = app.add_subcommand("eval-accuracy", "Classification accuracy");
  accuracy_cmd->add_option("--model", accuracy.model, "Classifier")->required();
  accuracy_cmd->add_option("--data", accuracy.data, "Labeled test data")->required();
  accuracy_cmd->add_option("--name", accuracy.name, "Variant name in the report");
  accuracy_cmd->add_option("--split", accuracy.split, "Split name in the report");
  accuracy_cmd->add_option("--out", accuracy.out, "Report file or - for stdout");

  SplitArgs split;
  auto* split_cmd = app.add_subcommand("split-analogy", "Split analogies by a banned-word set");
  split_cmd->add_option("--questions", split.questions, "Analogy file")->required();
  split_cmd->add_option("--banned-in", split.banned_in, "Use this banned list instead of sampling");
  split_cmd->add_option("--fraction", split.fraction, "Fraction of each category's words to ban");
  split_cmd->add_option("--seed", split.seed, "Random seed");
  split_cmd->add_flag("--keep-case", split.keep_case, "Do not lowercase tokens");
  split_cmd->add_option("--banned-out", split.banned_out, "Banned list output or - for stdout");
  split_cmd->add_option("--oov-out", split.oov_out, "Out-of-vocab questions")->required();
  split_cmd->add_option("--invocab-out", split.in_vocab_out, "In-vocab questions")->required();

  ExperimentArgs exp;
  auto* exp_cmd = app.add_subcommand("experiment", "Two-shard merge experiment");
  exp_cmd->add_option("--shard0", exp.shard0, "Old training shard")->required();
  exp_cmd->add_option("--shard1", exp.shard1, "New training shard")->required();
  exp_cmd->add_option("--test", exp.test, "Test set")->required();
  exp_cmd->add_option("--dim", exp.dim, "Hidden dimension");
  exp_cmd->add_option("--epochs", exp.epochs, "Training epochs");
  exp_cmd->add_option("--lr", exp.lr, "Training learning rate");
  exp_cmd->add_option("--ngrams", exp.ngrams, "1 = words, 2 = words and bigrams");
  exp_cmd->add_option("--min-count", exp.min_count, "Minimum feature count");
  exp_cmd->add_option("--seed", exp.seed, "Random seed");
  exp_cmd->add_option("--k", exp.k, "RCSLS neighborhood size");
  exp_cmd->add_option("--rcsls-lr", exp.rcsls_lr, "RCSLS learning rate");
  exp_cmd->add_option("--rcsls-epochs", exp.rcsls_epochs, "RCSLS epochs");
  exp_cmd->add_option("--pairs", exp.pairs, "all-common | top-norm:N");
  exp_cmd->add_option("--alpha", exp.alpha, "Merge weight of the fine-tuned model")
      ->check(CLI::Range(0.0, 1.0));
  exp_cmd->add_option("--out", exp.out, "Report file or - for stdout");
  exp_cmd->add_option("--merged-out", exp.merged_out, "Also save the merged classifier");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    for (const CLI::App* sub : app.get_subcommands()) echo_config(err, *sub);
    if (align_cmd->parsed()) return cmd_align(align, err);
    if (merge_vec_cmd->parsed()) return cmd_merge_vectors(merge_vec, err);
    if (merge_clf_cmd->parsed()) return cmd_merge_classifiers(merge_clf, err);
    if (train_cmd->parsed()) return cmd_train(train_args, err);
    if (predict_cmd->parsed()) return cmd_predict(predict_args, out);
    if (vote_cmd->parsed()) return cmd_vote(vote_args, out);
    if (analogy_cmd->parsed()) return cmd_eval_analogy(analogy, out);
    if (accuracy_cmd->parsed()) return cmd_eval_accuracy(accuracy, out);
    if (split_cmd->parsed()) return cmd_split_analogy(split, out, err);
    if (exp_cmd->parsed()) return cmd_experiment(exp, out, err);
  } catch (const NumericError& e) {
    err << "error: " << e.what() << '\n';
    return kNumericError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kDataError;
  }
  return kUsage;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  argv.push_back("vecmerge");
  for (const auto& arg : args) argv.push_back(arg.c_str());
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace vecmerge::cli
