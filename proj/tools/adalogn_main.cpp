// adalogn: command-line front end.
//
// Exit status: 0 success, 1 domain or validation error, 2 usage error.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "adalogn/config.hpp"
#include "adalogn/dataset.hpp"
#include "adalogn/fixtures.hpp"
#include "adalogn/ingest.hpp"
#include "adalogn/rules.hpp"
#include "adalogn/synth.hpp"
#include "adalogn/trace_io.hpp"
#include "adalogn/training.hpp"

#ifndef ADALOGN_VERSION_STRING
#define ADALOGN_VERSION_STRING "unknown"
#endif

namespace {

using namespace adalogn;
using ojson = nlohmann::ordered_json;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "' for reading");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

// Writes to `path`, or standard output when it is empty.
void emit(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  out << text;
  if (!out) throw Error("failed writing '" + path + "'");
}

ojson edge_json(const Edge& e) { return ojson::array({e.src, std::string(to_string(e.rel)), e.dst}); }

std::string candidates_json(const std::vector<ExtensionCandidate>& cands) {
  ojson arr = ojson::array();
  for (const auto& c : cands) {
    ojson j;
    j["rule"] = std::string(to_string(c.rule));
    j["premise_nodes"] = c.premise_nodes;
    ojson pe = ojson::array();
    for (const Edge& e : c.premise_edges) pe.push_back(edge_json(e));
    j["premise_edges"] = pe;
    ojson nn = ojson::array();
    for (const auto& n : c.new_nodes) {
      nn.push_back({{"placeholder", n.placeholder},
                    {"negates", n.negates},
                    {"text", n.text},
                    {"part", std::string(to_string(n.part))}});
    }
    j["new_nodes"] = nn;
    ojson ne = ojson::array();
    for (const Edge& e : c.new_edges) ne.push_back(edge_json(e));
    j["new_edges"] = ne;
    arr.push_back(j);
  }
  return arr.dump(2) + "\n";
}

// Flag overrides shared by train/eval/score.
struct ModelFlags {
  std::string variant;
  std::optional<double> tau;
  std::string rules;

  void add(CLI::App* app) {
    app->add_option("--variant", variant, "standard|no-ext|full-ext|no-at|n2n|n2n+")
        ->check(CLI::IsMember({"standard", "no-ext", "full-ext", "no-at", "n2n", "n2n+"}));
    app->add_option("--tau", tau, "relevance threshold");
    app->add_option("--rules", rules, "enabled rules, e.g. hs,tr,at");
  }

  void apply(ModelConfig& cfg) const {
    if (!variant.empty()) cfg.variant = variant_from_string(variant);
    if (tau) cfg.tau = *tau;
    if (!rules.empty()) cfg.rules = parse_rules(rules);
    if (cfg.variant == Variant::no_at) cfg.rules.erase(RuleId::at);
    validate(cfg);
  }
};

Model with_overrides(const Model& m, const ModelFlags& flags) {
  ModelConfig cfg = m.config();
  flags.apply(cfg);
  return Model(cfg, m.params().clone());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adaptive logic graph reasoning over text logic graphs"};
  app.set_version_flag("--version", std::string("adalogn ") + ADALOGN_VERSION_STRING);
  app.require_subcommand(1);
  app.failure_message(CLI::FailureMessage::help);

  // ingest
  auto* ingest = app.add_subcommand("ingest", "Build a raw TLG from text or a graph document");
  std::string in_context, in_option, in_graph, in_lexicon, in_out;
  LimitOptions limits;
  ingest->add_option("--context", in_context, "context text file");
  ingest->add_option("--option", in_option, "option text file");
  ingest->add_option("--graph", in_graph, "TLG document (skips segmentation)");
  ingest->add_option("--lexicon", in_lexicon, "connective lexicon (TSV)");
  ingest->add_option("--max-nodes", limits.max_nodes)->capture_default_str();
  ingest->add_option("--max-edges", limits.max_edges)->capture_default_str();
  ingest->add_option("--seed", limits.seed)->capture_default_str();
  ingest->add_option("-o,--output", in_out, "output TLG document (default: stdout)");

  // candidates / closure / dot
  auto* cands = app.add_subcommand("candidates", "List single-step rule extensions of a TLG");
  std::string c_graph, c_rules = "hs,tr,at", c_out;
  cands->add_option("--graph", c_graph)->required();
  cands->add_option("--rules", c_rules)->capture_default_str();
  cands->add_option("-o,--output", c_out);

  auto* clos = app.add_subcommand("closure", "Deductive closure of a TLG");
  std::string k_graph, k_rules = "hs,tr,at", k_out;
  std::size_t k_max = 256;
  clos->add_option("--graph", k_graph)->required();
  clos->add_option("--rules", k_rules)->capture_default_str();
  clos->add_option("--max-nodes", k_max)->capture_default_str();
  clos->add_option("-o,--output", k_out);

  auto* dot = app.add_subcommand("dot", "Render a TLG as Graphviz DOT");
  std::string d_graph, d_name = "tlg", d_out;
  dot->add_option("--graph", d_graph)->required();
  dot->add_option("--name", d_name)->capture_default_str();
  dot->add_option("-o,--output", d_out);

  // synth / audit
  auto* synth = app.add_subcommand("synth", "Generate a synthetic dataset");
  std::string s_spec, s_out;
  std::size_t s_n = 100;
  std::optional<std::uint64_t> s_seed;
  synth->add_option("--spec", s_spec, "generator spec (JSON)");
  synth->add_option("-n", s_n)->capture_default_str();
  synth->add_option("--seed", s_seed);
  synth->add_option("-o,--output", s_out)->required();

  auto* aud = app.add_subcommand("audit", "Re-verify dataset labels with the entailment oracle");
  std::string a_data;
  aud->add_option("--data", a_data)->required();

  // train / eval / score
  auto* trn = app.add_subcommand("train", "Train a model");
  std::string t_data, t_dev, t_config, t_out;
  std::optional<std::size_t> t_epochs, t_batch, t_d;
  std::optional<double> t_lr;
  std::optional<std::uint64_t> t_seed;
  std::string t_embedding;
  ModelFlags t_flags;
  trn->add_option("--data", t_data)->required();
  trn->add_option("--dev", t_dev);
  trn->add_option("--config", t_config, "configuration document (JSON)");
  trn->add_option("-o,--output", t_out, "checkpoint directory")->required();
  trn->add_option("--epochs", t_epochs);
  trn->add_option("--batch-size", t_batch);
  trn->add_option("--lr", t_lr);
  trn->add_option("--d", t_d);
  trn->add_option("--seed", t_seed);
  trn->add_option("--embedding", t_embedding, "hash|table");
  t_flags.add(trn);

  auto* evl = app.add_subcommand("eval", "Accuracy of a checkpoint on a dataset");
  std::string e_data, e_ckpt, e_records;
  bool e_traces = false;
  ModelFlags e_flags;
  evl->add_option("--data", e_data)->required();
  evl->add_option("--checkpoint", e_ckpt)->required();
  evl->add_option("--records", e_records, "per-instance records (JSONL)");
  evl->add_flag("--traces", e_traces, "include forward traces in the records");
  e_flags.add(evl);

  auto* scr = app.add_subcommand("score", "Score the options of one instance");
  std::string g_ctx, g_ckpt, g_trace, g_question = std::string(kDefaultQuestion);
  std::vector<std::string> g_opts;
  std::uint64_t g_seed = 0;
  ModelFlags g_flags;
  scr->add_option("--graph-context", g_ctx)->required();
  scr->add_option("--graph-options", g_opts)->required()->delimiter(',');
  scr->add_option("--checkpoint", g_ckpt, "checkpoint directory (default: fresh seeded model)");
  scr->add_option("--seed", g_seed)->capture_default_str();
  scr->add_option("--question", g_question);
  scr->add_option("--trace", g_trace, "write the forward trace document here");
  g_flags.add(scr);

  auto* gck = app.add_subcommand("gradcheck", "Finite-difference check of the model gradients");
  std::uint64_t gc_seed = 7;
  GradCheckOptions gc_opts;
  gck->add_option("--seed", gc_seed)->capture_default_str();
  gck->add_option("--eps", gc_opts.eps)->capture_default_str();
  gck->add_option("--tol", gc_opts.tol)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e, std::cerr, std::cerr);
    return 2;
  }

  try {
    if (*ingest) {
      Tlg g;
      if (!in_graph.empty()) {
        if (!in_context.empty() || !in_option.empty()) {
          throw UsageError("--graph excludes --context/--option");
        }
        g = load_tlg(in_graph);
      } else {
        if (in_context.empty() || in_option.empty()) {
          throw UsageError("ingest needs --graph or both --context and --option");
        }
        const ConnectiveLexicon lex =
            in_lexicon.empty() ? ConnectiveLexicon::builtin() : ConnectiveLexicon::load(in_lexicon);
        g = build_raw_tlg(segment(read_text(in_context), read_text(in_option), lex));
      }
      emit(in_out, serialize(limit_graph(g, limits)));
    } else if (*cands) {
      emit(c_out, candidates_json(enumerate_candidates(load_tlg(c_graph), parse_rules(c_rules))));
    } else if (*clos) {
      emit(k_out, serialize(closure(load_tlg(k_graph), parse_rules(k_rules), k_max)));
    } else if (*dot) {
      emit(d_out, to_dot(load_tlg(d_graph), d_name));
    } else if (*synth) {
      GeneratorSpec spec;
      if (!s_spec.empty()) merge_generator_spec(spec, read_text(s_spec));
      if (s_seed) spec.seed = *s_seed;
      const auto data = generate(s_n, spec);
      const AuditReport report = audit(data);
      if (!report.violations.empty()) {
        throw Error("generated data failed the audit (" +
                    std::to_string(report.violations.size()) + " violations)");
      }
      save_dataset(data, s_out);
      std::cerr << "wrote " << data.size() << " instances to " << s_out << "\n";
    } else if (*aud) {
      const AuditReport report = audit(load_dataset(a_data));
      ojson j;
      j["instances"] = report.instances;
      ojson v = ojson::array();
      for (const auto& x : report.violations) {
        v.push_back({{"instance", x.instance}, {"option", x.option}, {"message", x.message}});
      }
      j["violations"] = v;
      std::cout << j.dump(2) << "\n";
      if (!report.violations.empty()) return 1;
    } else if (*trn) {
      GlobalConfig cfg;
      if (!t_config.empty()) merge_global_config(cfg, read_text(t_config));
      if (t_seed) cfg.model.seed = cfg.train.seed = *t_seed;
      if (t_epochs) cfg.train.epochs = *t_epochs;
      if (t_batch) cfg.train.batch_size = *t_batch;
      if (t_lr) cfg.train.lr = *t_lr;
      if (t_d) cfg.model.d = *t_d;
      if (!t_embedding.empty()) cfg.model.embedding = embedding_mode_from_string(t_embedding);
      const auto train_set = load_dataset(t_data);
      const auto dev_set = t_dev.empty() ? std::vector<TaskInstance>{} : load_dataset(t_dev);
      if (cfg.model.embedding == EmbeddingMode::table && cfg.model.vocab.empty()) {
        auto all = train_set;
        all.insert(all.end(), dev_set.begin(), dev_set.end());
        cfg.model.vocab = collect_vocab(all);
      }
      t_flags.apply(cfg.model);
      validate(cfg.train);
      Model model(cfg.model);
      std::filesystem::create_directories(t_out);
      std::ofstream metrics(t_out + "/metrics.jsonl");
      if (!metrics) throw Error("cannot write metrics to '" + t_out + "'");
      const TrainResult result = train(model, train_set, dev_set, cfg.train, [&](const EpochRecord& r) {
        ojson j;
        j["epoch"] = r.epoch;
        j["loss"] = r.loss;
        j["dev_acc"] = r.dev_acc ? ojson(*r.dev_acc) : ojson(nullptr);
        std::cout << j.dump() << std::endl;
        metrics << j.dump() << "\n";
      });
      save_model(model, t_out + "/last");
      save_model(Model(model.config(), result.best), t_out + "/best");
    } else if (*evl) {
      const Model model = with_overrides(load_model(e_ckpt), e_flags);
      const auto data = load_dataset(e_data);
      const EvalResult r = evaluate(model, data, e_traces);
      if (!e_records.empty()) {
        std::string lines;
        for (const auto& rec : r.records) {
          ojson j;
          j["id"] = rec.id;
          j["scores"] = rec.scores;
          j["predicted"] = rec.predicted;
          j["gold"] = rec.gold;
          if (e_traces) j["traces"] = ojson::parse(trace_document(model.config(), rec.traces));
          lines += j.dump() + "\n";
        }
        emit(e_records, lines);
      }
      ojson j;
      j["accuracy"] = r.accuracy;
      j["instances"] = data.size();
      std::cout << j.dump() << "\n";
    } else if (*scr) {
      TaskInstance inst;
      inst.id = "score";
      inst.context = load_tlg(g_ctx);
      inst.question = g_question;
      for (const auto& path : g_opts) {
        inst.options.push_back(load_tlg(path));
        inst.option_texts.push_back(path);
      }
      Model base = [&] {
        if (!g_ckpt.empty()) return load_model(g_ckpt);
        ModelConfig cfg;
        cfg.seed = g_seed;
        return Model(cfg);
      }();
      const Model model = with_overrides(base, g_flags);
      const InstanceOutput out = model.forward_instance(inst, true);
      std::vector<double> scores(out.scores.data().begin(), out.scores.data().end());
      ojson j;
      j["scores"] = scores;
      j["predicted"] = argmax(scores);
      std::cout << j.dump() << "\n";
      if (!g_trace.empty()) emit(g_trace, trace_document(model.config(), out.traces));
    } else if (*gck) {
      const GradCheckReport r = run_gradcheck(gc_seed, gc_opts);
      std::cout << to_string(r);
      return r.passed ? 0 : 1;
    }
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
