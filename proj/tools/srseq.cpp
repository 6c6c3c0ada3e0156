// srseq: linearize, delinearize, evaluate and parse constituent treebanks.
//
// Exit codes: 0 success, 1 usage, 2 data error, 3 internal invariant breach.

#include <algorithm>
#include <array>
#include <cstdio>
#include <exception>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "srseq/decoder.hpp"
#include "srseq/mask.hpp"
#include "srseq/metrics.hpp"
#include "srseq/neural/checkpoint.hpp"
#include "srseq/neural/predict.hpp"
#include "srseq/neural/train.hpp"
#include "srseq/oracle.hpp"
#include "srseq/report.hpp"
#include "srseq/treebank_io.hpp"

using namespace srseq;
using nlohmann::json;

namespace {

constexpr int kOk = 0, kUsage = 1, kData = 2, kInternal = 3;
constexpr std::size_t kChunk = 512;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvariantBreach : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

Scheme scheme_arg(const std::string& name) {
  try {
    return parse_scheme(name);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

TreeFormat format_arg(const std::string& name) {
  try {
    return parse_tree_format(name);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

std::vector<Scheme> schemes_arg(const std::string& names) {
  if (names == "all") return shipped_schemes();
  std::vector<Scheme> out;
  std::stringstream ss(names);
  std::string part;
  while (std::getline(ss, part, ',')) out.push_back(scheme_arg(part));
  if (out.empty()) throw UsageError("no scheme given");
  return out;
}

std::unique_ptr<LineReader> open_reader(const std::string& path) {
  if (path.empty() || path == "-") return std::make_unique<LineReader>(std::cin);
  return std::make_unique<LineReader>(path);
}

class Output {
 public:
  explicit Output(const std::string& path) {
    if (path.empty() || path == "-") return;
    file_.open(path);
    if (!file_) throw DataError("cannot write '" + path + "'");
  }
  std::ostream& get() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

/// f(i) for every i in [0, n) on up to `jobs` threads. The lowest-index
/// failure is rethrown, so errors are reported deterministically.
void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& f) {
  const auto threads = static_cast<std::size_t>(std::max(1, jobs));
  if (threads == 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::vector<std::exception_ptr> errors(n);
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < std::min(threads, n); ++w)
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < n; i += threads) {
        try {
          f(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

struct NumberedLine {
  std::size_t number;
  std::string text;
};

/// Streams non-blank lines in chunks through `f`, writing results in input order.
void map_lines(LineReader& reader, const std::string& source, std::ostream& out, int jobs,
               const std::function<std::string(const std::string&)>& f) {
  std::vector<NumberedLine> chunk;
  auto flush = [&] {
    std::vector<std::string> results(chunk.size());
    parallel_for(chunk.size(), jobs, [&](std::size_t i) {
      try {
        results[i] = f(chunk[i].text);
      } catch (const std::exception& e) {
        throw DataError(source + ": line " + std::to_string(chunk[i].number) + ": " + e.what());
      }
    });
    for (const auto& r : results) out << r << '\n';
    chunk.clear();
  };
  std::string line;
  while (reader.next(line)) {
    if (is_blank(line)) continue;
    chunk.push_back({reader.line_number(), line});
    if (chunk.size() == kChunk) flush();
  }
  flush();
}

Treebank load(const std::string& path, TreeFormat format) {
  auto reader = open_reader(path);
  return load_treebank(*reader, path.empty() || path == "-" ? "<stdin>" : path, format);
}

std::string repair_summary(const RepairStats& s) {
  std::string out = "repaired " + std::to_string(s.repaired_items) + " of " + std::to_string(s.items) + " items";
  for (int r = 1; r <= 5; ++r)
    out += std::string(" ") + rule_name(static_cast<RepairRule>(r)) + "=" + std::to_string(s.by_rule[r]);
  return out;
}

// linearize ----------------------------------------------------------------

struct LinearizeArgs {
  std::string scheme, in = "-", out = "-", format = "auto";
  bool jsonl = false;
  int jobs = 1;
};

int run_linearize(const LinearizeArgs& a) {
  const Scheme scheme = scheme_arg(a.scheme);
  const TreeFormat format = format_arg(a.format);
  auto reader = open_reader(a.in);
  Output out(a.out);
  map_lines(*reader, a.in, out.get(), a.jobs, [&](const std::string& line) {
    const ConstituentTree tree = read_tree_line(line, format);
    const auto lin = encode(tree, scheme);
    if (!a.jsonl) return format_transitions(lin.tokens);
    json tokens = json::array();
    for (const auto& t : lin.tokens) tokens.push_back(t.str());
    return json{{"sentence", tree.words()}, {"scheme", scheme.name()}, {"tokens", tokens}}.dump();
  });
  return kOk;
}

// delinearize --------------------------------------------------------------

struct DelinearizeArgs {
  std::string scheme, sentences, tokens = "-", out = "-", root = "ROOT";
  int jobs = 1;
};

struct DecodeItem {
  std::size_t number;
  std::vector<std::string> words;
  std::vector<Transition> tokens;
  Scheme scheme;
};

DecodeItem jsonl_item(const std::string& line, std::size_t number, const std::optional<Scheme>& fixed) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::exception& e) {
    throw DataError("line " + std::to_string(number) + ": " + e.what());
  }
  if (!j.is_object() || !j.contains("sentence") || !j.contains("tokens"))
    throw DataError("line " + std::to_string(number) + ": expected an object with sentence and tokens");
  DecodeItem item{number, {}, {}, {}};
  try {
    item.words = j.at("sentence").get<std::vector<std::string>>();
    const auto& toks = j.at("tokens");
    if (toks.is_string()) {
      item.tokens = parse_transitions(toks.get<std::string>());
    } else {
      for (const auto& t : toks) item.tokens.push_back(parse_transition(t.get<std::string>()));
    }
  } catch (const std::exception& e) {
    throw DataError("line " + std::to_string(number) + ": " + e.what());
  }
  if (fixed) {
    item.scheme = *fixed;
    if (j.contains("scheme") && j["scheme"] != fixed->name())
      throw DataError("line " + std::to_string(number) + ": sequence was produced by scheme " +
                      j["scheme"].get<std::string>());
  } else if (j.contains("scheme")) {
    item.scheme = scheme_arg(j["scheme"].get<std::string>());
  } else {
    throw UsageError("--scheme is required when the input does not name one");
  }
  return item;
}

int run_delinearize(const DelinearizeArgs& a) {
  std::optional<Scheme> fixed;
  if (!a.scheme.empty()) fixed = scheme_arg(a.scheme);
  if (!a.sentences.empty() && !fixed) throw UsageError("--scheme is required with --sentences");
  if (a.sentences == "-" && a.tokens == "-") throw UsageError("sentences and tokens cannot both come from stdin");
  auto tok_reader = open_reader(a.tokens);
  std::unique_ptr<LineReader> sent_reader;
  if (!a.sentences.empty()) sent_reader = open_reader(a.sentences);
  Output out(a.out);
  const DecodeOptions options{a.root};
  RepairStats stats;

  std::vector<DecodeItem> chunk;
  auto flush = [&] {
    std::vector<std::optional<DecodeResult>> results(chunk.size());
    parallel_for(chunk.size(), a.jobs, [&](std::size_t i) {
      if (chunk[i].words.empty()) throw DataError("line " + std::to_string(chunk[i].number) + ": empty sentence");
      results[i] = decode(chunk[i].words, chunk[i].tokens, chunk[i].scheme, options);
    });
    for (std::size_t i = 0; i < chunk.size(); ++i) {
      accumulate(stats, *results[i]);
      for (const auto& r : results[i]->repairs)
        std::cerr << "line " << chunk[i].number << ": " << rule_name(r.rule) << " at token " << r.token_index << ": "
                  << r.detail << '\n';
      out.get() << emit_discbracket(results[i]->tree) << '\n';
    }
    chunk.clear();
  };

  std::string tline, sline;
  if (sent_reader) {
    while (true) {
      const bool has_s = sent_reader->next(sline);
      const bool has_t = tok_reader->next(tline);
      if (!has_s && !has_t) break;
      const std::size_t number = tok_reader->line_number();
      if (has_s != has_t) throw DataError("sentence and token files differ in length at line " + std::to_string(number));
      if (is_blank(sline) && is_blank(tline)) continue;
      std::vector<Transition> tokens;
      try {
        tokens = parse_transitions(tline);
      } catch (const std::exception& e) {
        throw DataError(a.tokens + ": line " + std::to_string(number) + ": " + e.what());
      }
      chunk.push_back({number, parse_sentence(sline), std::move(tokens), *fixed});
      if (chunk.size() == kChunk) flush();
    }
  } else {
    while (tok_reader->next(tline)) {
      if (is_blank(tline)) continue;
      chunk.push_back(jsonl_item(tline, tok_reader->line_number(), fixed));
      if (chunk.size() == kChunk) flush();
    }
  }
  flush();
  std::cerr << repair_summary(stats) << '\n';
  return kOk;
}

// roundtrip ----------------------------------------------------------------

struct RoundtripArgs {
  std::string scheme = "all", in = "-", format = "auto";
  int jobs = 1;
};

int run_roundtrip(const RoundtripArgs& a) {
  const bool all = a.scheme == "all";
  const auto schemes = schemes_arg(a.scheme);
  const Treebank bank = load(a.in, format_arg(a.format));
  struct Outcome {
    std::vector<std::string> failures;
    std::size_t checked = 0;
  };
  std::vector<Outcome> outcomes(bank.trees.size());
  parallel_for(bank.trees.size(), a.jobs, [&](std::size_t i) {
    const auto& tree = bank.trees[i];
    for (const auto& s : schemes) {
      if (all && s.continuous_only() && !is_continuous(tree)) continue;
      const auto lin = encode(tree, s);  // EncodeError is a data error for an explicit scheme
      const auto r = decode(tree.words(), lin.tokens, s);
      ++outcomes[i].checked;
      if (r.tree != tree || !r.repairs.empty())
        outcomes[i].failures.push_back("tree " + std::to_string(i + 1) + " " + s.name() + ": expected " +
                                       emit_discbracket(tree) + " got " + emit_discbracket(r.tree) + " with " +
                                       std::to_string(r.repairs.size()) + " repairs");
    }
  });
  std::size_t checked = 0, failed = 0;
  for (const auto& o : outcomes) {
    checked += o.checked;
    failed += o.failures.size();
    for (const auto& f : o.failures) std::cout << f << '\n';
  }
  std::cout << "checked " << checked << " encodings of " << bank.trees.size() << " trees: " << failed
            << " failures\n";
  return failed == 0 ? kOk : kInternal;
}

// stats --------------------------------------------------------------------

struct StatsArgs {
  std::string scheme = "all", in = "-", format = "auto";
};

int run_stats(const StatsArgs& a) {
  const bool all = a.scheme == "all";
  const auto schemes = schemes_arg(a.scheme);
  const Treebank bank = load(a.in, format_arg(a.format));
  const bool continuous = std::all_of(bank.trees.begin(), bank.trees.end(),
                                      [](const ConstituentTree& t) { return is_continuous(t); });
  std::printf("%-24s %8s %8s\n", "scheme", "size", "length");
  for (const auto& s : schemes) {
    if (all && s.continuous_only() && !continuous) {
      std::printf("%-24s %8s %8s\n", s.name().c_str(), "n/a", "n/a");
      continue;
    }
    const auto v = vocab_stats(bank.trees, s);
    std::printf("%-24s %8zu %8zu\n", s.name().c_str(), v.size, v.max_length);
  }
  std::fflush(stdout);
  return kOk;
}

// mask-trace ---------------------------------------------------------------

struct MaskTraceArgs {
  std::string scheme, tree, format = "auto";
};

int run_mask_trace(const MaskTraceArgs& a) {
  const Scheme scheme = scheme_arg(a.scheme);
  const ConstituentTree tree = read_tree_line(a.tree, format_arg(a.format));
  const auto tokens = encode(tree, scheme).tokens;
  const auto masks = trace(static_cast<int>(tree.size()), tokens, scheme);
  auto set = [&](const std::vector<double>& m) {
    std::string out = "[";
    for (int p : unmasked(m)) out += (out.size() > 1 ? " " : "") + escape_word(tree.words()[p]) + "_" + std::to_string(p);
    return out + "]";
  };
  for (std::size_t t = 0; t < masks.size(); ++t)
    std::cout << t << '\t' << (t == 0 ? std::string("-") : tokens[t - 1].str()) << '\t' << set(masks[t].stack)
              << '\t' << set(masks[t].buffer) << '\n';
  return kOk;
}

// eval ---------------------------------------------------------------------

struct EvalArgs {
  std::string gold, pred, format = "auto", zero = "hundred", punct;
  bool no_punct = false, ignore_root = false, as_json = false;
};

int run_eval(const EvalArgs& a) {
  EvalOptions opt;
  opt.ignore_punctuation = a.no_punct;
  opt.ignore_root = a.ignore_root;
  if (a.zero == "zero")
    opt.zero_denominator = ZeroDenominator::Zero;
  else if (a.zero != "hundred")
    throw UsageError("--zero-denominator must be hundred or zero");
  if (!a.punct.empty()) {
    opt.punctuation.clear();
    std::stringstream ss(a.punct);
    std::string p;
    while (std::getline(ss, p, ',')) opt.punctuation.insert(p);
  }
  if (a.gold == "-" && a.pred == "-") throw UsageError("gold and prediction cannot both come from stdin");
  const TreeFormat format = format_arg(a.format);
  const Treebank gold = load(a.gold, format);
  const Treebank pred = load(a.pred, format);
  const EvalReport report = evaluate(gold.trees, pred.trees, opt);
  if (a.as_json)
    std::cout << report_json(report).dump(2) << '\n';
  else
    std::cout << format_report(report);
  return kOk;
}

// train / predict ----------------------------------------------------------

struct TrainArgs {
  std::string scheme = "inorder+swap", in, checkpoint, preset = "toy";
  std::optional<int> epochs, d_model, layers, heads, ffn, warmup, batch_size, beam;
  std::optional<double> lr, dropout, label_smoothing;
  std::optional<unsigned long long> seed;
  int eval_every = 0, jobs = 1;
  bool stop_at_exact = false;
};

int run_train(const TrainArgs& a) {
  neural::ModelConfig cfg;
  if (a.preset == "large")
    cfg = neural::ModelConfig::large_preset();
  else if (a.preset != "toy")
    throw UsageError("--preset must be toy or large");
  if (a.epochs) cfg.epochs = *a.epochs;
  if (a.d_model) cfg.d_model = *a.d_model;
  if (a.layers) cfg.encoder_layers = cfg.decoder_layers = *a.layers;
  if (a.heads) cfg.heads = *a.heads;
  if (a.ffn) cfg.d_ff = *a.ffn;
  if (a.warmup) cfg.warmup = *a.warmup;
  if (a.batch_size) cfg.batch_size = *a.batch_size;
  if (a.beam) cfg.beam = *a.beam;
  if (a.lr) cfg.lr = *a.lr;
  if (a.dropout) cfg.dropout = *a.dropout;
  if (a.label_smoothing) cfg.label_smoothing = *a.label_smoothing;
  if (a.seed) cfg.seed = *a.seed;
  try {
    cfg.check();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  const Scheme scheme = scheme_arg(a.scheme);
  const Treebank bank = load(a.in, TreeFormat::Auto);

  neural::TrainOptions opt;
  opt.jobs = a.jobs;
  opt.eval_every = a.eval_every;
  opt.stop_at_exact = a.stop_at_exact;
  opt.on_epoch = [](const neural::EpochStats& s) {
    std::printf("epoch %d\tloss %.6f\tlr %.3g", s.epoch, s.loss, s.lr);
    if (s.exact_match) std::printf("\texact %.4f", *s.exact_match);
    std::printf("\n");
    std::fflush(stdout);
  };
  const auto result = neural::train(bank.trees, scheme, cfg, opt);
  neural::save_checkpoint(a.checkpoint, result.model);
  std::cerr << "saved " << a.checkpoint << " (" << result.model.params.count() << " parameters, "
            << result.history.size() << " epochs)\n";
  return kOk;
}

struct PredictArgs {
  std::string checkpoint, in, sentences, out = "-", tokens_out;
  std::optional<int> beam;
  int max_length = 0, jobs = 1;
};

int run_predict(const PredictArgs& a) {
  if (a.in.empty() == a.sentences.empty()) throw UsageError("give exactly one of --in and --sentences");
  const neural::Model model = neural::load_checkpoint(a.checkpoint);
  const int beam = a.beam.value_or(model.config.beam);
  if (beam < 1) throw UsageError("--beam must be positive");

  std::vector<std::vector<std::string>> sentences;
  if (!a.in.empty()) {
    for (const auto& t : load(a.in, TreeFormat::Auto).trees) sentences.push_back(t.words());
  } else {
    auto reader = open_reader(a.sentences);
    std::string line;
    while (reader->next(line))
      if (!is_blank(line)) sentences.push_back(parse_sentence(line));
  }

  std::vector<neural::Prediction> preds(sentences.size());
  parallel_for(sentences.size(), a.jobs, [&](std::size_t i) {
    preds[i] = neural::predict(model.params, model.config, model.vocab, model.scheme, sentences[i], beam, a.max_length);
  });
  std::vector<std::vector<Transition>> sequences;
  for (const auto& p : preds) sequences.push_back(p.tokens);
  const BatchResult batch = decode_batch(sentences, sequences, model.scheme);

  Output out(a.out);
  for (const auto& t : batch.trees) out.get() << emit_discbracket(t) << '\n';
  if (!a.tokens_out.empty()) {
    Output tok(a.tokens_out);
    for (const auto& s : sequences) tok.get() << format_transitions(s) << '\n';
  }
  std::cerr << repair_summary(batch.stats) << '\n';
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Shift-reduce linearizations of (dis)continuous constituent trees"};
  app.require_subcommand(1);

  LinearizeArgs lin;
  auto* c_lin = app.add_subcommand("linearize", "Trees to transition sequences");
  c_lin->add_option("--scheme", lin.scheme, "Linearization scheme, e.g. inorder+swap")->required();
  c_lin->add_option("--in", lin.in, "Treebank, one tree per line (- for stdin, .gz accepted)");
  c_lin->add_option("--format", lin.format, "bracketed, discbracket or auto");
  c_lin->add_option("--out", lin.out, "Output file (- for stdout)");
  c_lin->add_flag("--jsonl", lin.jsonl, "Write {sentence, scheme, tokens} objects");
  c_lin->add_option("--jobs", lin.jobs, "Worker threads")->check(CLI::PositiveNumber);

  DelinearizeArgs del;
  auto* c_del = app.add_subcommand("delinearize", "Transition sequences back to trees");
  c_del->add_option("--scheme", del.scheme, "Scheme; optional for JSONL input that names one");
  c_del->add_option("--sentences", del.sentences, "One sentence per line; omit for JSONL token input");
  c_del->add_option("--tokens", del.tokens, "Token lines or JSONL (- for stdin)");
  c_del->add_option("--out", del.out, "Output discbracket file (- for stdout)");
  c_del->add_option("--root-label", del.root, "Label for repaired roots");
  c_del->add_option("--jobs", del.jobs, "Worker threads")->check(CLI::PositiveNumber);

  RoundtripArgs rt;
  auto* c_rt = app.add_subcommand("roundtrip", "Check decode(encode(t)) == t");
  c_rt->add_option("--scheme", rt.scheme, "Scheme, comma list, or all (applicable schemes only)");
  c_rt->add_option("--in", rt.in, "Treebank");
  c_rt->add_option("--format", rt.format, "bracketed, discbracket or auto");
  c_rt->add_option("--jobs", rt.jobs, "Worker threads")->check(CLI::PositiveNumber);

  StatsArgs st;
  auto* c_st = app.add_subcommand("stats", "Output dictionary size and longest sequence");
  c_st->add_option("--scheme", st.scheme, "Scheme, comma list, or all");
  c_st->add_option("--in", st.in, "Treebank");
  c_st->add_option("--format", st.format, "bracketed, discbracket or auto");

  MaskTraceArgs mt;
  auto* c_mt = app.add_subcommand("mask-trace", "Per-step stack and buffer masks of a tree's oracle sequence");
  c_mt->add_option("--scheme", mt.scheme, "Scheme")->required();
  c_mt->add_option("--tree", mt.tree, "Tree in bracketed or discbracket form")->required();
  c_mt->add_option("--format", mt.format, "bracketed, discbracket or auto");

  EvalArgs ev;
  auto* c_ev = app.add_subcommand("eval", "Labeled F1, discontinuous F1 and exact match");
  c_ev->add_option("--gold", ev.gold, "Gold treebank")->required();
  c_ev->add_option("--pred", ev.pred, "Predicted treebank")->required();
  c_ev->add_option("--format", ev.format, "bracketed, discbracket or auto");
  c_ev->add_flag("--no-punct", ev.no_punct, "Remove punctuation before matching");
  c_ev->add_flag("--ignore-root", ev.ignore_root, "Do not score root nodes");
  c_ev->add_option("--punct", ev.punct, "Comma-separated punctuation list replacing the default");
  c_ev->add_option("--zero-denominator", ev.zero, "Score with no items on either side: hundred or zero");
  c_ev->add_flag("--json", ev.as_json, "JSON report with per-sentence counts");

  TrainArgs tr;
  auto* c_tr = app.add_subcommand("train", "Train the toy seq2seq parser");
  c_tr->add_option("--scheme", tr.scheme, "Scheme");
  c_tr->add_option("--in", tr.in, "Training treebank")->required();
  c_tr->add_option("--checkpoint", tr.checkpoint, "Where to write the model")->required();
  c_tr->add_option("--preset", tr.preset, "toy or large");
  c_tr->add_option("--epochs", tr.epochs, "Training epochs");
  c_tr->add_option("--seed", tr.seed, "Random seed");
  c_tr->add_option("--d-model", tr.d_model, "Model width");
  c_tr->add_option("--layers", tr.layers, "Encoder and decoder layers");
  c_tr->add_option("--heads", tr.heads, "Attention heads (>= 2)");
  c_tr->add_option("--ffn", tr.ffn, "Feed-forward width");
  c_tr->add_option("--lr", tr.lr, "Peak learning rate");
  c_tr->add_option("--warmup", tr.warmup, "Warm-up updates");
  c_tr->add_option("--batch-size", tr.batch_size, "Sentences per update");
  c_tr->add_option("--dropout", tr.dropout, "Dropout rate");
  c_tr->add_option("--label-smoothing", tr.label_smoothing, "Label smoothing");
  c_tr->add_option("--beam", tr.beam, "Default beam stored in the checkpoint");
  c_tr->add_option("--eval-every", tr.eval_every, "Greedy exact-match check every N epochs");
  c_tr->add_flag("--stop-at-exact", tr.stop_at_exact, "Stop once that check reaches 100%");
  c_tr->add_option("--jobs", tr.jobs, "Worker threads")->check(CLI::PositiveNumber);

  PredictArgs pr;
  auto* c_pr = app.add_subcommand("predict", "Parse sentences with a trained model");
  c_pr->add_option("--checkpoint", pr.checkpoint, "Trained model")->required();
  c_pr->add_option("--in", pr.in, "Treebank whose sentences are parsed");
  c_pr->add_option("--sentences", pr.sentences, "One sentence per line");
  c_pr->add_option("--out", pr.out, "Output discbracket file (- for stdout)");
  c_pr->add_option("--tokens-out", pr.tokens_out, "Also write the predicted token sequences");
  c_pr->add_option("--beam", pr.beam, "Beam width (default from the checkpoint)");
  c_pr->add_option("--max-length", pr.max_length, "Hard cap on sequence length (0 = automatic)");
  c_pr->add_option("--jobs", pr.jobs, "Worker threads")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (c_lin->parsed()) return run_linearize(lin);
    if (c_del->parsed()) return run_delinearize(del);
    if (c_rt->parsed()) return run_roundtrip(rt);
    if (c_st->parsed()) return run_stats(st);
    if (c_mt->parsed()) return run_mask_trace(mt);
    if (c_ev->parsed()) return run_eval(ev);
    if (c_tr->parsed()) return run_train(tr);
    if (c_pr->parsed()) return run_predict(pr);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kData;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kData;
  } catch (const TreebankError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kData;
  } catch (const EncodeError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kData;
  } catch (const EvalError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kData;
  } catch (const TokenError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kData;
  } catch (const neural::CheckpointError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kData;
  } catch (const neural::TrainingError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kData;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kInternal;
  }
  return kInternal;
}
