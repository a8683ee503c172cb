#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <sstream>

#include "g3eq/cli.hpp"
#include "support.hpp"

using namespace g3eq;
using namespace g3eq::testing;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    int status;
    std::string out;
    std::string err;
};

Outcome run_tool(const std::vector<std::string> &args) {
    std::ostringstream out;
    std::ostringstream err;
    const int status = run(args, out, err);
    return {status, out.str(), err.str()};
}

class Cli : public ::testing::Test {
protected:
    fs::path dir;

    void SetUp() override {
        const auto *info = ::testing::UnitTest::GetInstance()->current_test_info();
        dir = fs::temp_directory_path() / ("g3eq_cli_" + std::string(info->name()));
        fs::remove_all(dir);
        fs::create_directories(dir);
    }
    void TearDown() override { fs::remove_all(dir); }

    std::string write(const std::string &name, const std::string &text) {
        const fs::path p = dir / name;
        std::ofstream(p) << text;
        return p.string();
    }
    std::string path(const std::string &name) const { return (dir / name).string(); }
};

const std::string header = "(signature (fun f 1) (pred P 1) (pred Q 2) (const c) (const d))\n";

bool contains(const std::string &hay, const std::string &needle) { return hay.find(needle) != std::string::npos; }

}  // namespace

TEST_F(Cli, UsageErrors) {
    EXPECT_EQ(run_tool({}).status, 2);
    EXPECT_EQ(run_tool({"frobnicate"}).status, 2);
    EXPECT_EQ(run_tool({"--help"}).status, 0);
    EXPECT_EQ(run_tool({"transform", data_path("golden/symm.g3"), "--pass", "nope"}).status, 2);
}

TEST_F(Cli, CheckGoldenFiles) {
    for (const char *name : {"golden/repl_minus_instance.g3", "golden/contr_eq.g3", "golden/symm.g3"}) {
        const auto r = run_tool({"check", data_path(name)});
        EXPECT_EQ(r.status, 0) << name << "\n" << r.out << r.err;
        EXPECT_TRUE(contains(r.out, ": ok\n"));
        EXPECT_TRUE(contains(r.out, "1 derivations, 0 failed")) << r.out;
    }
}

TEST_F(Cli, CheckEmptyDocument) {
    const auto r = run_tool({"check", write("empty.g3", header + "(config logic=c eq=minus)\n")});
    EXPECT_EQ(r.status, 0);
    EXPECT_TRUE(contains(r.out, "0 derivations")) << r.out;
}

TEST_F(Cli, CheckReportsDisabledRule) {
    const std::string file = write("full.g3", header +
                                                  "(config logic=c eq=minus)\n"
                                                  "(derivation uses_repl (rule repl :eq 0 :target 1 :pos ((0))\n"
                                                  "  (seq ((= c d) (P c)) ((P d)))\n"
                                                  "  (axiom (seq ((= c d) (P c) (P d)) ((P d))))))\n");
    const auto r = run_tool({"check", file});
    EXPECT_EQ(r.status, 1);
    EXPECT_TRUE(contains(r.out, "rule not enabled")) << r.out;
    EXPECT_TRUE(contains(r.out, "1 derivations, 1 failed"));
    // The same file passes once the full rule is switched on.
    EXPECT_EQ(run_tool({"check", file, "--eq", "full"}).status, 0);
}

TEST_F(Cli, InputErrorsExitTwo) {
    EXPECT_EQ(run_tool({"check", path("missing.g3")}).status, 2);
    const auto r = run_tool({"check", write("bad.g3", header + "(config logic=c eq=minus)\n(goal g (seq ((R c)) ()))")});
    EXPECT_EQ(r.status, 2);
    EXPECT_TRUE(contains(r.err, "3:16:")) << r.err;
    EXPECT_EQ(run_tool({"check", data_path("golden/symm.g3"), "--logic", "z"}).status, 2);
}

TEST_F(Cli, SymmNeedsAnAntecedentEquality) {
    const std::string file =
        write("plain.g3", header + "(config logic=c eq=minus)\n(derivation leaf (axiom (seq ((P c)) ((P c)))))\n");
    const auto r = run_tool({"transform", file, "--pass", "symm"});
    EXPECT_EQ(r.status, 1);
    EXPECT_TRUE(contains(r.err, "leaf")) << r.err;
    EXPECT_TRUE(contains(r.err, "no antecedent equality")) << r.err;
}

TEST_F(Cli, TransformRejectsInputThatDoesNotCheck) {
    const std::string file =
        write("broken.g3", header + "(config logic=c eq=minus)\n(derivation leaf (axiom (seq ((P c)) ((P d)))))\n");
    EXPECT_EQ(run_tool({"transform", file, "--pass", "expand"}).status, 1);
}

TEST_F(Cli, SymmAndContractionPasses) {
    const std::string file = write("eq.g3", header +
                                                "(config logic=c eq=one)\n"
                                                "(derivation leaf (axiom (seq ((= c d) (= c d) (P c)) ((P c)))))\n");
    const auto symm = run_tool({"transform", file, "--pass", "symm", "--out", path("symm.g3")});
    ASSERT_EQ(symm.status, 0) << symm.err;
    EXPECT_TRUE(contains(symm.out, "nodes_before=1 nodes_after=4")) << symm.out;
    EXPECT_EQ(run_tool({"check", path("symm.g3")}).status, 0);
    const auto contr = run_tool({"transform", file, "--pass", "contr-eq", "--out", path("contr.g3")});
    ASSERT_EQ(contr.status, 0) << contr.err;
    EXPECT_TRUE(contains(contr.out, "nodes_before=1 nodes_after=3")) << contr.out;
    EXPECT_EQ(run_tool({"check", path("contr.g3")}).status, 0);
}

TEST_F(Cli, ReplEliminationRemovesFullReplacements) {
    ASSERT_EQ(run_tool({"gen", "--seed", "3", "--count", "8", "--height", "4", "--density", "0.5", "--eq", "full",
                        "--out", path("full.g3")})
                  .status,
              0);
    ASSERT_TRUE(contains(read_text(path("full.g3")), "(rule repl"));
    const auto r = run_tool({"transform", path("full.g3"), "--pass", "repl-elim", "--out", path("minus.g3")});
    ASSERT_EQ(r.status, 0) << r.err;
    EXPECT_TRUE(contains(r.out, "name=gen_3 "));
    EXPECT_TRUE(contains(r.out, "repl_after=0"));
    const std::string text = read_text(path("minus.g3"));
    EXPECT_FALSE(contains(text, "(rule repl ")) << text;
    EXPECT_FALSE(contains(text, "(rule repl1 "));
    EXPECT_EQ(run_tool({"check", path("minus.g3")}).status, 0);
    EXPECT_EQ(parse_document(text).config.equality, EqualityMode::Minus);
}

TEST_F(Cli, ToFullAndBackPreservesEndsequents) {
    ASSERT_EQ(
        run_tool({"gen", "--seed", "11", "--count", "6", "--height", "4", "--eq", "minus", "--out", path("m.g3")}).status,
        0);
    ASSERT_EQ(run_tool({"transform", path("m.g3"), "--pass", "to-full", "--out", path("f.g3")}).status, 0);
    ASSERT_EQ(run_tool({"transform", path("f.g3"), "--pass", "repl-elim", "--bundle", "--out", path("b.g3")}).status, 0);
    const auto a = parse_document(read_text(path("m.g3")));
    const auto b = parse_document(read_text(path("b.g3")));
    ASSERT_EQ(a.derivations.size(), b.derivations.size());
    for (std::size_t i = 0; i < a.derivations.size(); ++i) {
        EXPECT_EQ(a.derivations[i].name, b.derivations[i].name);
        EXPECT_TRUE(sequent_equal(a.derivations[i].derivation.conclusion, b.derivations[i].derivation.conclusion));
    }
}

TEST_F(Cli, StatsGoToStderrWhenDocumentIsOnStdout) {
    const auto r = run_tool({"transform", data_path("golden/repl_minus_instance.g3"), "--pass", "expand"});
    ASSERT_EQ(r.status, 0);
    EXPECT_TRUE(contains(r.out, "(signature"));
    EXPECT_TRUE(contains(r.err, "nodes_before="));
    EXPECT_FALSE(contains(r.out, "nodes_before="));
}

TEST_F(Cli, ProveRewriteGoal) {
    const auto r = run_tool({"prove", "--goal", "(seq ((= c d) (P c)) ((P d)))", "--depth", "3", "--mode", "minus",
                             "--out", path("p.g3")});
    ASSERT_EQ(r.status, 0) << r.err;
    EXPECT_TRUE(contains(r.out, "goal: found")) << r.out;
    EXPECT_TRUE(contains(r.out, "proof_nodes=2 inferences=1")) << r.out;
    const auto doc = parse_document(read_text(path("p.g3")));
    ASSERT_EQ(doc.derivations.size(), 1u);
    EXPECT_EQ(count_nodes(doc.derivations[0].derivation), 2u);
    EXPECT_EQ(run_tool({"check", path("p.g3")}).status, 0);
}

TEST_F(Cli, ProveAxiomGivesLeaf) {
    const auto r = run_tool({"prove", "--goal", "(seq ((P c)) ((P c)))", "--depth", "1"});
    ASSERT_EQ(r.status, 0);
    const auto doc = parse_document(r.out);
    ASSERT_EQ(doc.derivations.size(), 1u);
    EXPECT_EQ(doc.derivations[0].derivation.rule.tag, RuleTag::Axiom);
}

TEST_F(Cli, ProveReportsBudgetExhaustion) {
    const auto r = run_tool({"prove", "--goal", "(seq ((P c)) ((P d)))", "--depth", "3"});
    EXPECT_EQ(r.status, 1);
    EXPECT_TRUE(contains(r.err, "depth-exhausted")) << r.err;
    EXPECT_TRUE(contains(r.out, "(goal goal")) << r.out;
    const auto n = run_tool({"prove", "--goal", "(seq ((= c d) (Q c d)) ((Q d c)))", "--max-nodes", "2"});
    EXPECT_EQ(n.status, 1);
    EXPECT_TRUE(contains(n.err, "node-limit")) << n.err;
}

TEST_F(Cli, ProveCorpusFile) {
    const auto r = run_tool({"prove", data_path("data/equality_corpus.g3"), "--out", path("corpus.g3")});
    EXPECT_EQ(r.status, 1);  // the unprovable goals stay goals
    const auto doc = parse_document(read_text(path("corpus.g3")));
    EXPECT_EQ(doc.derivations.size() + doc.goals.size(), 50u);
    EXPECT_GE(doc.derivations.size(), 30u);
    EXPECT_EQ(run_tool({"check", path("corpus.g3")}).status, 0);
}

TEST_F(Cli, GenIsDeterministic) {
    const auto a = run_tool({"gen", "--count", "5", "--seed", "7"});
    const auto b = run_tool({"gen", "--count", "5", "--seed", "7"});
    ASSERT_EQ(a.status, 0);
    EXPECT_EQ(a.out, b.out);
    const auto doc = parse_document(a.out);
    ASSERT_EQ(doc.derivations.size(), 5u);
    EXPECT_EQ(doc.derivations.front().name, "gen_7");
    EXPECT_EQ(doc.derivations.back().name, "gen_11");
    EXPECT_NE(a.out, run_tool({"gen", "--count", "5", "--seed", "8"}).out);
}

TEST_F(Cli, SeedEnvironmentOverride) {
    const std::string seeded = run_tool({"gen", "--seed", "42"}).out;
    ::setenv("G3EQ_SEED", "42", 1);
    const auto r = run_tool({"gen", "--seed", "1"});
    ::setenv("G3EQ_SEED", "forty", 1);
    const auto bad = run_tool({"gen"});
    ::unsetenv("G3EQ_SEED");
    EXPECT_EQ(r.out, seeded);
    EXPECT_EQ(bad.status, 2);
}

TEST_F(Cli, OutputFileIsWrittenWhole) {
    ASSERT_EQ(run_tool({"gen", "--count", "3", "--out", path("g.g3")}).status, 0);
    std::size_t entries = 0;
    for ([[maybe_unused]] const auto &e : fs::directory_iterator(dir)) ++entries;
    EXPECT_EQ(entries, 1u);
    EXPECT_EQ(read_text(path("g.g3")), run_tool({"gen", "--count", "3"}).out);
    EXPECT_EQ(run_tool({"check", path("g.g3")}).status, 0);
}
