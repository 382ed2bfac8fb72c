#include "adalogn/fixtures.hpp"

#include "adalogn/training.hpp"

namespace adalogn {

namespace {

Tlg implication(const std::string& from, const std::string& to) {
  Tlg g;
  const NodeId a = g.add_node(from, Part::option);
  const NodeId b = g.add_node(to, Part::option);
  g.add_edge(a, Relation::impl, b);
  return g;
}

}  // namespace

TaskInstance gradcheck_instance() {
  TaskInstance inst;
  inst.id = "gradcheck";
  const NodeId p0 = inst.context.add_node("P0", Part::context);
  const NodeId p1 = inst.context.add_node("P1", Part::context);
  const NodeId p2 = inst.context.add_node("P2", Part::context);
  inst.context.add_edge(p0, Relation::impl, p1);
  inst.context.add_edge(p1, Relation::impl, p2);
  inst.question = "Which one of the following can be properly inferred?";
  inst.options = {implication("not P2", "not P0"), implication("P2", "P0")};
  inst.option_texts = {"if not P2 then not P0", "if P2 then P0"};
  inst.gold = 0;
  return inst;
}

ModelConfig gradcheck_config(std::uint64_t seed) {
  ModelConfig cfg;
  cfg.d = 8;
  cfg.iterations = 2;
  cfg.tau = 0.5;
  cfg.seed = seed;
  cfg.embedding = EmbeddingMode::table;
  cfg.vocab = {"P0", "P1", "P2"};
  return cfg;
}

GradCheckReport run_gradcheck(std::uint64_t seed, const GradCheckOptions& opts) {
  Model model(gradcheck_config(seed));
  const TaskInstance inst = gradcheck_instance();
  const double gamma = model.config().gamma;
  return finite_diff_check(
      [&] { return loss(model.forward_instance(inst, false).scores, inst.gold, gamma); },
      model.params(), opts);
}

}  // namespace adalogn
