#include <gtest/gtest.h>

#include <set>

#include "../support/dsl_fuzz.hpp"
#include "stagecheck/dsl.hpp"
#include "stagecheck/errors.hpp"
#include "stagecheck/program.hpp"

using namespace stagecheck;
using namespace stagecheck::dsl;

namespace {

const std::filesystem::path kCorpus = STAGECHECK_CORPUS_DIR;

const char* kPaddleBounce =
    "TRIGGER t1 WHEN isTouch ball paddle AFTER 5 STEPS THEN IF direction OF ball != SAVED direction OF ball "
    "THEN Report paddle_bounce SUCC ELSE Report paddle_bounce FAIL";

Program pong() { return load_program_file(kCorpus / "programs" / "reference.json"); }

Read live(std::string sprite, Prop p) { return Read{PropRef{std::move(sprite), p}, false}; }
Read saved(std::string sprite, Prop p) { return Read{PropRef{std::move(sprite), p}, true}; }

ParseError parse_error(std::string_view text) {
    try {
        parse_suite(text);
    } catch (const ParseError& e) {
        return e;
    }
    ADD_FAILURE() << "no error for: " << text;
    return ParseError({}, "");
}

}  // namespace

TEST(Parse, PaddleBounce) {
    const auto suite = parse_suite(kPaddleBounce);
    ASSERT_EQ(suite.size(), 1u);
    const auto& t = suite[0];
    EXPECT_EQ(t.id, "t1");
    EXPECT_EQ(t.conditions, (std::vector<Condition>{IsTouch{"ball", "paddle"}}));
    EXPECT_EQ(t.delay_steps, 5);
    ASSERT_EQ(t.actions.size(), 1u);
    const IfThenElse expected{Compare{live("ball", Prop::Direction), CompareOp::Ne, saved("ball", Prop::Direction)},
                              Report{"paddle_bounce", true}, Report{"paddle_bounce", false}};
    EXPECT_EQ(t.actions[0], Action{expected});
    EXPECT_EQ(t.flags, Flags{});
    EXPECT_EQ(t.pos.line, 1);
}

TEST(Parse, InputWithDuration) {
    const auto t = parse_suite("TRIGGER follow WHEN y OF ball > y OF paddle AFTER 1 STEPS THEN DO Input up-arrow Key FOR 4 STEPS")[0];
    EXPECT_EQ(t.actions[0], (Action{Do{InputKey{Key::UpArrow, 4}}}));
    EXPECT_EQ(t.conditions[0], (Condition{Compare{live("ball", Prop::Y), CompareOp::Gt, live("paddle", Prop::Y)}}));
    EXPECT_FALSE(is_var_compare(std::get<Compare>(t.conditions[0])));
}

TEST(Parse, InputDefaultsToOneStep) {
    const auto t = parse_suite("TRIGGER k WHEN Always AFTER 0 STEPS THEN DO Input space Key")[0];
    EXPECT_EQ(t.actions[0], (Action{Do{InputKey{Key::Space, 1}}}));
}

TEST(Parse, EmptyConditionList) {
    const auto e = parse_error("TRIGGER bad WHEN AFTER 1 STEPS THEN DO Nothing");
    EXPECT_EQ(e.pos().line, 1);
    EXPECT_EQ(e.pos().column, 18);
    EXPECT_FALSE(e.expected().empty());
}

TEST(Parse, ConjunctionAndFlags) {
    const auto t = parse_suite(R"(
        TRIGGER c WHEN keyDown space AND score = 0 spriteOnEdge ball any
        AFTER 2 STEPS THEN DO Nothing THEN DO Report r SUCC DO AddTrigger c
        add-on-start debounce one-shot)")[0];
    ASSERT_EQ(t.conditions.size(), 3u);
    EXPECT_TRUE(is_var_compare(std::get<Compare>(t.conditions[1])));
    EXPECT_EQ(t.conditions[2], (Condition{OnEdge{"ball", Side::Any}}));
    EXPECT_EQ(t.actions.size(), 3u);
    EXPECT_EQ(t.flags, (Flags{true, true, true}));
}

TEST(Parse, ReferencesAndNumbers) {
    const auto t = parse_suite(
        "TRIGGER r WHEN SAVED hits OF ball >= -2.5 AND lives < 1e2 AND x OF ball <= SAVED score AFTER 0 STEPS THEN DO Nothing")[0];
    const auto& a = std::get<Compare>(t.conditions[0]);
    EXPECT_EQ(a.lhs, Operand{(Read{VarRef{"hits", "ball"}, true})});
    EXPECT_EQ(a.rhs, Operand{Literal{-2.5}});
    EXPECT_EQ(std::get<Compare>(t.conditions[1]).rhs, Operand{Literal{100}});
    EXPECT_EQ(std::get<Compare>(t.conditions[2]).rhs, Operand{(Read{VarRef{"score", ""}, true})});
}

TEST(Parse, InfixTouchEqualsPrefix) {
    EXPECT_EQ(parse_suite("TRIGGER a WHEN ball isTouch paddle AFTER 0 STEPS THEN DO Nothing"),
              parse_suite("TRIGGER a WHEN isTouch ball paddle AFTER 0 STEPS THEN DO Nothing"));
}

TEST(Parse, CommentsAndLayout) {
    const auto s = parse_suite("# top\nTRIGGER a # trailing\n WHEN Always\n\n AFTER 0 STEPS THEN DO Nothing\n# end\n");
    EXPECT_EQ(s.size(), 1u);
    EXPECT_EQ(parse_suite("").size(), 0u);
    EXPECT_EQ(parse_suite("# only a comment").size(), 0u);
}

TEST(Parse, Errors) {
    const char* bad[] = {
        "TRIGGER",
        "TRIGGER a WHEN Always AFTER 1 THEN DO Nothing",
        "TRIGGER a WHEN Always AFTER -1 STEPS THEN DO Nothing",
        "TRIGGER a WHEN Always AFTER 1.5 STEPS THEN DO Nothing",
        "TRIGGER a WHEN Always AFTER 1 STEPS THEN",
        "TRIGGER a WHEN Always AFTER 1 STEPS THEN DO Input enter Key",
        "TRIGGER a WHEN Always AFTER 1 STEPS THEN DO Input space Key FOR 0 STEPS",
        "TRIGGER a WHEN Always AFTER 1 STEPS THEN DO Report r MAYBE",
        "TRIGGER a WHEN Always AFTER 1 STEPS THEN IF Always THEN Nothing",
        "TRIGGER a WHEN spriteOnEdge ball middle AFTER 1 STEPS THEN DO Nothing",
        "TRIGGER a WHEN x OF ball AFTER 1 STEPS THEN DO Nothing",
        "TRIGGER a WHEN x OF ball ! 3 AFTER 1 STEPS THEN DO Nothing",
        "TRIGGER a WHEN Always AFTER 1 STEPS THEN DO Nothing debounce debounce",
        "TRIGGER a WHEN Always AFTER 1 STEPS THEN DO Nothing junk",
        "TRIGGER WHEN WHEN Always AFTER 1 STEPS THEN DO Nothing",
        "TRIGGER a WHEN Always AFTER 1 STEPS THEN DO Nothing $",
        "trigger a WHEN Always AFTER 1 STEPS THEN DO Nothing",
    };
    for (const char* text : bad) {
        const auto e = parse_error(text);
        EXPECT_GE(e.pos().line, 1) << text;
    }
}

TEST(Parse, DuplicateId) {
    EXPECT_THROW(parse_suite("TRIGGER a WHEN Always AFTER 0 STEPS THEN DO Nothing\n"
                             "TRIGGER a WHEN Always AFTER 0 STEPS THEN DO Nothing"),
                 DuplicateTriggerId);
}

// Malformed input never crashes: every prefix and every single-token drop of a
// valid suite either parses or raises ParseError with a position.
TEST(Parse, ErrorsAreTotal) {
    const std::string text = kPaddleBounce;
    for (std::size_t n = 0; n <= text.size(); ++n) {
        try {
            parse_suite(text.substr(0, n));
        } catch (const ParseError& e) {
            ASSERT_GE(e.pos().line, 1);
        }
    }
    std::vector<std::string> words;
    std::istringstream in(text);
    for (std::string w; in >> w;) words.push_back(w);
    for (std::size_t drop = 0; drop < words.size(); ++drop) {
        std::string t;
        for (std::size_t i = 0; i < words.size(); ++i)
            if (i != drop) t += words[i] + " ";
        try {
            parse_suite(t);
        } catch (const ParseError& e) {
            ASSERT_GE(e.pos().line, 1);
        }
    }
}

TEST(Print, CanonicalForms) {
    const auto t = parse_suite("TRIGGER z WHEN Always AFTER 0 STEPS THEN DO Input space Key one-shot add-on-start debounce")[0];
    const auto text = pretty_print(t);
    EXPECT_NE(text.find("AFTER 0 STEPS"), std::string::npos);
    EXPECT_NE(text.find("debounce one-shot add-on-start"), std::string::npos);
    EXPECT_EQ(text.find("FOR"), std::string::npos);
    EXPECT_EQ(pretty_print(parse_suite("TRIGGER z WHEN Always AFTER 0 STEPS THEN DO Input space Key FOR 3 STEPS")[0])
                  .find("FOR 3 STEPS") != std::string::npos,
              true);
}

TEST(Print, RoundTripPaddleBounce) {
    const auto s = parse_suite(kPaddleBounce);
    EXPECT_EQ(parse_suite(pretty_print(s)), s);
}

TEST(Print, RoundTripFuzzed) {
    for (int i = 0; i < 500; ++i) {
        fuzz::SuiteWriter w(77 + i);
        const std::string text = w.suite(1 + i % 6);
        const auto s = parse_suite(text);
        const auto printed = pretty_print(s);
        const auto again = parse_suite(printed);
        ASSERT_EQ(again, s) << text << "\n----\n" << printed;
        ASSERT_EQ(pretty_print(again), printed);
    }
}

TEST(Print, NumbersSurvive) {
    for (double v : {0.1, -0.0, 1e-7, 123456789.125, -2.5e20, 1.0 / 3.0}) {
        TriggerDef d;
        d.id = "n";
        d.conditions = {Compare{Literal{v}, CompareOp::Lt, Read{VarRef{"score", ""}, false}}};
        d.actions = {Do{Nothing{}}};
        const auto back = parse_suite(pretty_print(d));
        EXPECT_EQ(std::get<Literal>(std::get<Compare>(back[0].conditions[0]).lhs).value, v);
    }
}

TEST(Validate, ReferenceSuiteIsClean) {
    const auto suite = parse_suite_file(kCorpus / "pong.suite");
    const auto d = validate_suite(suite, pong());
    EXPECT_TRUE(d.empty()) << (d.empty() ? "" : d[0].to_string());
}

TEST(Validate, MisspelledSprite) {
    const auto d = validate_suite(parse_suite("TRIGGER a WHEN x OF bal > 0 AFTER 0 STEPS THEN DO Nothing"), pong());
    ASSERT_EQ(d.size(), 1u);
    EXPECT_EQ(d[0].severity, Severity::Error);
    EXPECT_EQ(d[0].trigger, "a");
    EXPECT_EQ(d[0].pos.line, 1);
}

TEST(Validate, DanglingTrigger) {
    const auto d = validate_suite(parse_suite("TRIGGER a WHEN Always AFTER 0 STEPS THEN DO AddTrigger t9"), pong());
    ASSERT_EQ(d.size(), 1u);
    EXPECT_TRUE(has_errors(d));
}

TEST(Validate, OtherProblems) {
    const auto p = pong();
    EXPECT_TRUE(has_errors(validate_suite(parse_suite("TRIGGER a WHEN lives = 0 AFTER 0 STEPS THEN DO Nothing"), p)));
    EXPECT_TRUE(has_errors(validate_suite(parse_suite("TRIGGER a WHEN running OF paddle = 0 AFTER 0 STEPS THEN DO Nothing"), p)));
    EXPECT_FALSE(has_errors(validate_suite(parse_suite("TRIGGER a WHEN running OF ball = 0 AFTER 0 STEPS THEN DO Nothing"), p)));
    EXPECT_TRUE(has_errors(validate_suite(parse_suite("TRIGGER a WHEN isTouch ball ball AFTER 0 STEPS THEN DO Nothing"), p)));
    EXPECT_TRUE(has_errors(validate_suite(parse_suite("TRIGGER a WHEN Always AFTER 0 STEPS THEN IF spriteOnEdge wall top THEN Nothing ELSE RemoveTrigger q"), p)));
}

TEST(Helpers, SavedRefsAndIds) {
    const auto s = parse_suite(R"(
        TRIGGER a WHEN x OF ball > SAVED x OF ball AFTER 1 STEPS
          THEN IF score > SAVED score THEN Report one SUCC ELSE Report two FAIL
          THEN DO Report one FAIL
        TRIGGER b WHEN Always AFTER 0 STEPS THEN DO Input space Key)");
    EXPECT_EQ(saved_refs_in_actions(s[0]), std::vector<ValueRef>{(VarRef{"score", ""})});
    EXPECT_EQ(saved_refs_in_conditions(s[0]), std::vector<ValueRef>{(PropRef{"ball", Prop::X})});
    EXPECT_EQ(report_test_ids(s), (std::vector<std::string>{"one", "two"}));
    EXPECT_FALSE(has_input_action(s[0]));
    EXPECT_TRUE(has_input_action(s[1]));
}

// Every production of the grammar shows up in the shipped suite.
TEST(Coverage, ShippedSuiteUsesWholeGrammar) {
    const auto suite = parse_suite_file(kCorpus / "pong.suite");
    std::set<std::string> seen;
    auto item = [&](const ActionItem& i) {
        std::visit([&](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, Nothing>) seen.insert("Nothing");
            else if constexpr (std::is_same_v<T, Report>) seen.insert(v.success ? "SUCC" : "FAIL");
            else if constexpr (std::is_same_v<T, InputKey>) seen.insert(v.steps == 1 ? "Input" : "Input FOR");
            else if constexpr (std::is_same_v<T, AddTrigger>) seen.insert("AddTrigger");
            else seen.insert("RemoveTrigger");
        }, i);
    };
    auto operand = [&](const Operand& o) {
        if (std::holds_alternative<Literal>(o)) return seen.insert("literal"), void();
        const auto& r = std::get<Read>(o);
        if (r.saved) seen.insert("SAVED");
        if (std::holds_alternative<PropRef>(r.ref)) seen.insert("prop");
        else seen.insert(std::get<VarRef>(r.ref).sprite.empty() ? "global var" : "local var");
    };
    auto cond = [&](const Condition& c) {
        std::visit([&](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, Always>) seen.insert("Always");
            else if constexpr (std::is_same_v<T, IsTouch>) seen.insert("isTouch");
            else if constexpr (std::is_same_v<T, OnEdge>) seen.insert("spriteOnEdge " + std::string(side_name(v.side)));
            else if constexpr (std::is_same_v<T, KeyDown>) seen.insert("keyDown");
            else if constexpr (std::is_same_v<T, RandomCoin>) seen.insert("Random-True/False");
            else {
                seen.insert(std::string(op_text(v.op)));
                operand(v.lhs);
                operand(v.rhs);
            }
        }, c);
    };
    for (const auto& t : suite) {
        for (const auto& c : t.conditions) cond(c);
        for (const auto& a : t.actions) {
            if (const auto* d = std::get_if<Do>(&a)) {
                seen.insert("DO");
                item(d->item);
            } else {
                const auto& ite = std::get<IfThenElse>(a);
                seen.insert("IF");
                cond(ite.cond);
                item(ite.then_item);
                item(ite.else_item);
            }
        }
        if (t.flags.debounce) seen.insert("debounce");
        if (t.flags.one_shot) seen.insert("one-shot");
        if (t.flags.add_on_start) seen.insert("add-on-start");
        if (t.conditions.size() > 1) seen.insert("conjunction");
        if (t.actions.size() > 1) seen.insert("action list");
    }
    const char* required[] = {"Always", "isTouch", "spriteOnEdge top", "spriteOnEdge bottom", "spriteOnEdge left",
                              "spriteOnEdge any", "keyDown", "Random-True/False", "=", "!=", "<", "<=", ">", ">=",
                              "literal", "prop", "global var", "local var", "SAVED", "DO", "IF", "Nothing", "SUCC",
                              "FAIL", "Input", "Input FOR", "AddTrigger", "RemoveTrigger", "debounce", "one-shot",
                              "add-on-start", "conjunction", "action list"};
    for (const char* r : required) EXPECT_TRUE(seen.count(r)) << r;
    EXPECT_GE(suite.size(), 20u);
}
