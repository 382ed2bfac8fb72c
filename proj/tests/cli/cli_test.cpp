#include <gtest/gtest.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "adalogn/tlg.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using adalogn::Relation;

namespace {

struct CliRun {
  int code = -1;
  std::string out;
};

// Runs the CLI with stderr discarded and returns its exit status and stdout.
CliRun cli(const std::string& args) {
  const std::string cmd = std::string(ADALOGN_CLI) + " " + args + " 2>/dev/null";
  CliRun r;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return r;
  std::array<char, 4096> buf{};
  std::size_t n = 0;
  while ((n = std::fread(buf.data(), 1, buf.size(), p)) > 0) r.out.append(buf.data(), n);
  const int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("adalogn_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string write(const std::string& name, const std::string& text) const {
    const std::string path = (dir_ / name).string();
    std::ofstream(path) << text;
    return path;
  }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  std::string chain_graph() const {
    adalogn::Tlg g;
    for (const char* t : {"a", "b", "c"}) g.add_node(t, adalogn::Part::context);
    g.add_edge(0, Relation::impl, 1);
    g.add_edge(1, Relation::impl, 2);
    return write("chain.tlg.json", adalogn::serialize(g));
  }

  fs::path dir_;
};

}  // namespace

TEST_F(CliTest, VersionAndUsageErrors) {
  const CliRun v = cli("--version");
  EXPECT_EQ(v.code, 0);
  EXPECT_EQ(v.out.rfind("adalogn ", 0), 0u);
  EXPECT_EQ(cli("").code, 2);
  EXPECT_EQ(cli("frobnicate").code, 2);
  EXPECT_EQ(cli("closure").code, 2);  // --graph is required
  EXPECT_EQ(cli("closure --graph x --bogus").code, 2);
  EXPECT_EQ(cli("--help").code, 0);
}

TEST_F(CliTest, DomainErrorsExitOne) {
  EXPECT_EQ(cli("closure --graph " + path("missing.json")).code, 1);
  EXPECT_EQ(cli("closure --graph " + write("bad.json", "{not json")).code, 1);
  EXPECT_EQ(cli("candidates --graph " + chain_graph() + " --rules hs,xx").code, 1);
}

TEST_F(CliTest, ClosureAddsHsEdges) {
  const CliRun r = cli("closure --graph " + chain_graph() + " --rules hs");
  ASSERT_EQ(r.code, 0);
  const adalogn::Tlg g = adalogn::deserialize(r.out);
  EXPECT_TRUE(g.has_edge(0, Relation::impl, 2));
  EXPECT_TRUE(g.has_edge(2, Relation::rev, 0));
  EXPECT_TRUE(g.is_inferred({0, Relation::impl, 2}));

  ASSERT_EQ(cli("closure --graph " + chain_graph() + " --rules hs -o " + path("out.json")).code, 0);
  std::ifstream in(path("out.json"));
  std::stringstream text;
  text << in.rdbuf();
  EXPECT_EQ(text.str(), r.out);
}

TEST_F(CliTest, CandidatesListsOneHs) {
  const CliRun r = cli("candidates --graph " + chain_graph() + " --rules hs");
  ASSERT_EQ(r.code, 0);
  const auto j = nlohmann::json::parse(r.out);
  ASSERT_EQ(j.size(), 1u);
  EXPECT_EQ(j[0]["rule"], "hs");
  EXPECT_EQ(j[0]["premise_nodes"], nlohmann::json::array({0, 1, 2}));
  EXPECT_EQ(j[0]["new_edges"].size(), 2u);
}

TEST_F(CliTest, DotRendersDigraph) {
  const CliRun r = cli("dot --graph " + chain_graph() + " --name chain");
  ASSERT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("digraph chain"), std::string::npos);
}

TEST_F(CliTest, IngestFromText) {
  const std::string ctx = write("ctx.txt",
                                "If the company gets project A, product B can be put on the market on schedule.");
  const std::string opt = write("opt.txt", "Product B is on the market.");
  const CliRun r = cli("ingest --context " + ctx + " --option " + opt);
  ASSERT_EQ(r.code, 0);
  const adalogn::Tlg g = adalogn::deserialize(r.out);
  EXPECT_EQ(g.size(), 3u);
  EXPECT_TRUE(g.has_edge(1, Relation::rev, 0));
  EXPECT_EQ(cli("ingest --context " + ctx).code, 2);
}

TEST_F(CliTest, SynthAuditTrainEvalScore) {
  const std::string spec = write("spec.json", R"({"vars": 5, "chain_len": 3})");
  ASSERT_EQ(cli("synth --spec " + spec + " -n 8 --seed 3 -o " + path("d.jsonl")).code, 0);
  const CliRun audit = cli("audit --data " + path("d.jsonl"));
  EXPECT_EQ(audit.code, 0);
  EXPECT_EQ(nlohmann::json::parse(audit.out)["violations"].size(), 0u);

  const CliRun train = cli("train --data " + path("d.jsonl") + " --dev " + path("d.jsonl") +
                        " --epochs 2 --d 8 --embedding table -o " + path("ck"));
  ASSERT_EQ(train.code, 0);
  EXPECT_TRUE(fs::exists(path("ck/best/params.bin")));
  EXPECT_TRUE(fs::exists(path("ck/last/model.json")));
  EXPECT_TRUE(fs::exists(path("ck/metrics.jsonl")));

  const CliRun eval = cli("eval --data " + path("d.jsonl") + " --checkpoint " + path("ck/best") +
                       " --records " + path("rec.jsonl"));
  ASSERT_EQ(eval.code, 0);
  const auto acc = nlohmann::json::parse(eval.out);
  EXPECT_EQ(acc["instances"], 8);
  EXPECT_GE(acc["accuracy"].get<double>(), 0.0);
  EXPECT_TRUE(fs::exists(path("rec.jsonl")));

  // Score the first instance's options against its context.
  std::ifstream in(path("d.jsonl"));
  std::string line;
  std::getline(in, line);
  const auto inst = nlohmann::json::parse(line);
  const std::string ctx = write("ctx.tlg.json", inst["context_graph"].dump());
  std::string opts;
  for (std::size_t i = 0; i < inst["option_graphs"].size(); ++i) {
    opts += (i ? "," : "") + write("o" + std::to_string(i) + ".tlg.json", inst["option_graphs"][i].dump());
  }
  const CliRun score = cli("score --graph-context " + ctx + " --graph-options " + opts + " --checkpoint " +
                        path("ck/best") + " --trace " + path("trace.json"));
  ASSERT_EQ(score.code, 0);
  const auto s = nlohmann::json::parse(score.out);
  EXPECT_EQ(s["scores"].size(), 4u);
  EXPECT_TRUE(fs::exists(path("trace.json")));
  EXPECT_EQ(cli("score --graph-context " + ctx + " --graph-options " + opts + " --variant nope").code, 2);
}

TEST_F(CliTest, AuditFlagsCorruptLabels) {
  ASSERT_EQ(cli("synth -n 4 --seed 1 -o " + path("d.jsonl")).code, 0);
  std::ifstream in(path("d.jsonl"));
  std::string out, line;
  while (std::getline(in, line)) {
    auto j = nlohmann::json::parse(line);
    j["gold"] = (j["gold"].get<int>() + 1) % 4;
    out += j.dump() + "\n";
  }
  const CliRun r = cli("audit --data " + write("bad.jsonl", out));
  EXPECT_EQ(r.code, 1);
  EXPECT_GT(nlohmann::json::parse(r.out)["violations"].size(), 0u);
}

TEST_F(CliTest, GradcheckExitMatchesReport) {
  const CliRun r = cli("gradcheck --seed 7");
  ASSERT_TRUE(r.code == 0 || r.code == 1);
  const bool passed = r.out.find(" PASS\n") != std::string::npos;
  EXPECT_NE(r.out.find("max_rel="), std::string::npos);
  EXPECT_EQ(r.code == 0, passed);
}
