#include <gtest/gtest.h>

#include <cmath>
#include <thread>

#include "readctl/errors.hpp"
#include "readctl/garbage.hpp"
#include "readctl/mock_rewriter.hpp"
#include "readctl/prompts.hpp"
#include "support/synthetic.hpp"

using namespace readctl;

// --- prompts ------------------------------------------------------------------

TEST(Prompts, StandardCatalog) {
    const auto& cat = PromptCatalog::standard();
    const auto specs = cat.specs();
    ASSERT_EQ(specs.size(), 8u);
    for (std::size_t i = 0; i < specs.size(); ++i) {
        EXPECT_EQ(specs[i].target_level, kTargetLevels[i]);
        EXPECT_TRUE(specs[i].instruction.starts_with("Paraphrase this document for "));
    }
    EXPECT_TRUE(cat.instruction(95).starts_with("Paraphrase this document for 5th grade school level (US)."));
    EXPECT_NE(cat.instruction(5).find("extremely difficult to read"), std::string::npos);
    EXPECT_THROW(cat.instruction(50), UnknownLevel);
}

TEST(Prompts, MentionClassDescription) {
    const std::map<int, std::string> phrase{
        {5, "extremely difficult to read"}, {20, "very difficult to read"}, {40, "difficult to read"},
        {55, "fairly difficult to read"},   {65, "plain english"},          {75, "fairly easy to read"},
        {85, "conversational english"},     {95, "very easy to read"},
    };
    for (const auto& [level, p] : phrase) {
        EXPECT_NE(to_lower_ascii(PromptCatalog::standard().instruction(level)).find(p), std::string::npos) << level;
        EXPECT_NE(to_lower_ascii(std::string(class_for_level(level).description)).find(p), std::string::npos)
            << level;
    }
}

TEST(Prompts, BuildPrompt) {
    const auto r = build_prompt(40, "Some text.");
    ASSERT_EQ(r.messages.size(), 2u);
    EXPECT_EQ(r.messages[0].role, "system");
    EXPECT_EQ(r.messages[0].content, kDefaultSystemMessage);
    EXPECT_EQ(r.messages[1].role, "user");
    EXPECT_EQ(r.messages[1].content,
              "Paraphrase this document for college level (US). It should be difficult to read.\n\nSome text.");
    EXPECT_THROW(build_prompt(50, "x"), UnknownLevel);
    const auto bare = build_prompt(PromptCatalog::standard(), 5, "x", "");
    EXPECT_EQ(bare.messages.size(), 1u);
}

TEST(Prompts, JsonRoundTrip) {
    const auto& cat = PromptCatalog::standard();
    const auto back = PromptCatalog::from_json(nlohmann::json::parse(cat.to_json().dump()));
    EXPECT_EQ(back, cat);
    EXPECT_EQ(back.specs(), cat.specs());

    auto over = PromptCatalog::from_json(nlohmann::json{{"5", "Make it hard."}});
    EXPECT_EQ(over.instruction(5), "Make it hard.");
    EXPECT_THROW(PromptCatalog::from_json(nlohmann::json{{"five", "x"}}), ConfigError);
    EXPECT_THROW(PromptCatalog::from_json(nlohmann::json(3)), ConfigError);
}

// --- garbage ------------------------------------------------------------------

TEST(Garbage, Examples) {
    const std::string source = synth::read_fixture("ballroom/source.txt");
    EXPECT_FALSE(detect_garbage(source, source));
    EXPECT_TRUE(detect_garbage("xq zvrk qwpt xq zvrk qwpt bcdf the", source));
    EXPECT_TRUE(detect_garbage("ok", source));
    EXPECT_FALSE(detect_garbage("ok", "Short source."));
    EXPECT_TRUE(detect_garbage("", "x"));
    EXPECT_TRUE(detect_garbage("the cat the the the the the sat", source));
    EXPECT_FALSE(detect_garbage("the the the the cat sat on a mat", source));
    EXPECT_TRUE(detect_garbage("## -- 12 34 ** a !! 99 %% b", source));
}

TEST(Garbage, ReasonsAndThresholds) {
    EXPECT_EQ(garbage_reason("", "x"), "empty output");
    const auto r = garbage_reason("go go go go go", "x");
    ASSERT_TRUE(r);
    EXPECT_NE(r->find("repeated"), std::string::npos);
    GarbageThresholds lax;
    lax.repeat_run = 10;
    EXPECT_FALSE(detect_garbage("go go go go go", "x", lax));
}

TEST(Garbage, NoFalsePositivesOnFixtures) {
    for (const char* f : {"source.txt", "target_5.txt", "target_20.txt", "target_40.txt", "target_55.txt",
                          "target_65.txt", "target_75.txt", "target_85.txt", "target_95.txt"}) {
        const auto text = synth::read_fixture(std::string("ballroom/") + f);
        EXPECT_FALSE(detect_garbage(text, text)) << f << ": " << garbage_reason(text, text).value_or("");
    }
    for (const auto& p : synth::corpus(20, 10, 95, 5)) {
        EXPECT_FALSE(detect_garbage(p.text, p.text)) << p.id;
    }
}

// --- synonym lexicon --------------------------------------------------------------

TEST(Synonyms, BuiltinIsBidirectional) {
    const auto& lex = SynonymLexicon::builtin();
    EXPECT_GT(lex.pair_count(), 500u);
    const auto& a = lex.alternatives("use");
    EXPECT_NE(std::find(a.begin(), a.end(), "utilize"), a.end());
    const auto& b = lex.alternatives("utilize");
    EXPECT_NE(std::find(b.begin(), b.end(), "use"), b.end());
    EXPECT_TRUE(lex.alternatives("zzzz").empty());
}

TEST(Synonyms, Parse) {
    const auto lex = SynonymLexicon::parse("# comment\r\nBig\tLarge\r\n\nbig\thuge\n");
    EXPECT_EQ(lex.pair_count(), 2u);
    EXPECT_EQ(lex.alternatives("big"), (std::vector<std::string>{"huge", "large"}));
    EXPECT_THROW(SynonymLexicon::parse("no tab here\n"), ConfigError);
}

// --- mock rewriter ----------------------------------------------------------------

TEST(MockRewrite, BallroomToNinetyFive) {
    const auto src = synth::read_fixture("ballroom/source.txt");
    const auto r = mock_rewrite(src, 95, 0);
    EXPECT_NEAR(r.initial_fres, 74.5, 2.0);
    EXPECT_GE(r.final_fres, 91.0);
    EXPECT_LE(r.final_fres, 99.0);
    EXPECT_DOUBLE_EQ(fres(r.text).fres, r.final_fres);
}

TEST(MockRewrite, AlreadyWithinToleranceIsIdentity) {
    const auto src = synth::read_fixture("ballroom/source.txt");
    const auto r = mock_rewrite(src, 75, 0);
    EXPECT_EQ(r.iterations, 0);
    EXPECT_EQ(r.text, src);
}

TEST(MockRewrite, Deterministic) {
    const auto src = synth::read_fixture("ballroom/target_20.txt");
    for (int t : kTargetLevels) {
        const auto a = mock_rewrite(src, t, 42);
        const auto b = mock_rewrite(src, t, 42);
        EXPECT_EQ(a.text, b.text);
        EXPECT_EQ(a.iterations, b.iterations);
    }
}

TEST(MockRewrite, DeterministicAcrossThreads) {
    const auto src = synth::read_fixture("ballroom/target_5.txt");
    const auto expected = mock_rewrite(src, 85, 9).text;
    std::vector<std::string> got(8);
    std::vector<std::jthread> pool;
    for (std::size_t i = 0; i < got.size(); ++i) {
        pool.emplace_back([&, i] { got[i] = mock_rewrite(src, 85, 9).text; });
    }
    pool.clear();
    for (const auto& g : got) EXPECT_EQ(g, expected);
}

TEST(MockRewrite, TraceIsMonotone) {
    for (const auto& p : synth::corpus(12, 10, 95, 21)) {
        for (int t : kTargetLevels) {
            const auto r = mock_rewrite(p.text, t, 1);
            double prev = std::abs(r.initial_fres - t);
            for (const auto& step : r.trace) {
                const double gap = std::abs(step.fres - t);
                EXPECT_LT(gap, prev) << p.id << " -> " << t << " at " << step.edit;
                prev = gap;
            }
            EXPECT_EQ(static_cast<int>(r.trace.size()), r.iterations);
            EXPECT_LE(r.iterations, 50);
        }
    }
}

TEST(MockRewrite, SyntheticCorpusReachesTargets) {
    std::size_t within = 0, total = 0;
    for (const auto& p : synth::corpus(20, 10, 95, 33)) {
        for (int t : kTargetLevels) {
            const auto r = mock_rewrite(p.text, t, 1);
            within += std::abs(r.final_fres - t) <= 4.0;
            ++total;
        }
    }
    EXPECT_GE(static_cast<double>(within) / total, 0.9);
}

TEST(MockRewrite, PreservesParagraphBreaksOnSwaps) {
    const std::string src = "The dog helped the man.\n\nThe cat helped the boy.";
    MockRewriteOptions o;
    o.tolerance = 0.5;
    o.max_iterations = 1;
    const auto r = mock_rewrite(src, 40, 0, o);
    ASSERT_EQ(r.iterations, 1);
    EXPECT_EQ(r.trace[0].edit, "swap-all helped->assisted");
    EXPECT_EQ(r.text, "The dog assisted the man.\n\nThe cat assisted the boy.");

    o.max_iterations = 50;
    const auto merged = mock_rewrite(src, 40, 0, o);
    EXPECT_EQ(merged.text, "The dog assisted the gentleman, and the cat assisted the youngster.");
}

TEST(MockRewrite, EmptyThrows) {
    EXPECT_THROW(mock_rewrite("  ", 40), EmptyText);
}

TEST(MockRewrite, CustomLexicon) {
    const auto lex = SynonymLexicon::parse("cat\tfeline\n");
    MockRewriteOptions o;
    o.synonyms = &lex;
    o.tolerance = 0.1;
    const auto r = mock_rewrite("Cat sat.", 5, 0, o);
    EXPECT_NE(r.text.find("Feline"), std::string::npos);
}
