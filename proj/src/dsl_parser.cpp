#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include "stagecheck/dsl.hpp"

namespace stagecheck::dsl {

namespace {

enum class Tok { Word, Number, Op, End };

struct Token {
    Tok kind = Tok::End;
    std::string text;
    double number = 0.0;
    CompareOp op = CompareOp::Eq;
    SourcePos pos;
};

const std::set<std::string, std::less<>>& keywords() {
    static const std::set<std::string, std::less<>> words{
        "TRIGGER", "WHEN", "AFTER", "STEPS", "THEN", "DO", "IF", "ELSE", "AND", "Report", "SUCC",
        "FAIL", "Input", "Key", "FOR", "AddTrigger", "RemoveTrigger", "Nothing", "isTouch",
        "spriteOnEdge", "keyDown", "Always", "Random-True/False", "debounce", "one-shot",
        "add-on-start", "SAVED", "OF"};
    return words;
}

constexpr std::string_view kCoin = "Random-True/False";

class Lexer {
public:
    explicit Lexer(std::string_view text) : text_(text) {}

    std::vector<Token> run() {
        std::vector<Token> out;
        while (true) {
            skip_space();
            Token t;
            t.pos = {line_, col_};
            if (i_ >= text_.size()) {
                out.push_back(t);
                return out;
            }
            const char c = text_[i_];
            if (text_.substr(i_, kCoin.size()) == kCoin && !word_char_at(i_ + kCoin.size())) {
                t.kind = Tok::Word;
                t.text = std::string(kCoin);
                advance(kCoin.size());
            } else if (is_word_start(c)) {
                std::size_t j = i_;
                while (word_char_at(j)) ++j;
                t.kind = Tok::Word;
                t.text = std::string(text_.substr(i_, j - i_));
                advance(j - i_);
            } else if (is_digit(c) || (c == '-' && i_ + 1 < text_.size() && is_digit(text_[i_ + 1]))) {
                lex_number(t);
            } else if (c == '=' || c == '<' || c == '>' || c == '!') {
                lex_op(t);
            } else {
                throw ParseError(t.pos, std::string("unexpected character '") + c + "'");
            }
            out.push_back(std::move(t));
        }
    }

private:
    static bool is_digit(char c) { return c >= '0' && c <= '9'; }
    static bool is_word_start(char c) {
        return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || c == '_';
    }
    bool word_char_at(std::size_t j) const {
        if (j >= text_.size()) return false;
        const char c = text_[j];
        return is_word_start(c) || is_digit(c) || c == '-';
    }

    void advance(std::size_t n) {
        for (std::size_t k = 0; k < n; ++k) {
            if (text_[i_] == '\n') {
                ++line_;
                col_ = 1;
            } else {
                ++col_;
            }
            ++i_;
        }
    }

    void skip_space() {
        while (i_ < text_.size()) {
            const char c = text_[i_];
            if (c == '#') {
                while (i_ < text_.size() && text_[i_] != '\n') advance(1);
            } else if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
                advance(1);
            } else {
                return;
            }
        }
    }

    void lex_number(Token& t) {
        std::size_t j = i_;
        if (text_[j] == '-') ++j;
        while (j < text_.size() && is_digit(text_[j])) ++j;
        if (j + 1 < text_.size() && text_[j] == '.' && is_digit(text_[j + 1])) {
            ++j;
            while (j < text_.size() && is_digit(text_[j])) ++j;
        }
        if (j < text_.size() && (text_[j] == 'e' || text_[j] == 'E')) {
            std::size_t k = j + 1;
            if (k < text_.size() && (text_[k] == '+' || text_[k] == '-')) ++k;
            if (k < text_.size() && is_digit(text_[k])) {
                while (k < text_.size() && is_digit(text_[k])) ++k;
                j = k;
            }
        }
        if (word_char_at(j)) throw ParseError(t.pos, "malformed number");
        t.kind = Tok::Number;
        t.text = std::string(text_.substr(i_, j - i_));
        auto [ptr, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), t.number);
        if (ec != std::errc() || ptr != t.text.data() + t.text.size())
            throw ParseError(t.pos, "number out of range");
        advance(j - i_);
    }

    void lex_op(Token& t) {
        const char c = text_[i_];
        const bool eq_follows = i_ + 1 < text_.size() && text_[i_ + 1] == '=';
        t.kind = Tok::Op;
        switch (c) {
            case '=': t.op = CompareOp::Eq; break;
            case '!':
                if (!eq_follows) throw ParseError(t.pos, "unexpected character '!'", {"!="});
                t.op = CompareOp::Ne;
                break;
            case '<': t.op = eq_follows ? CompareOp::Le : CompareOp::Lt; break;
            case '>': t.op = eq_follows ? CompareOp::Ge : CompareOp::Gt; break;
        }
        const std::size_t len = (c == '!' || (c != '=' && eq_follows)) ? 2 : 1;
        t.text = std::string(text_.substr(i_, len));
        advance(len);
    }

    std::string_view text_;
    std::size_t i_ = 0;
    int line_ = 1;
    int col_ = 1;
};

class Parser {
public:
    explicit Parser(std::vector<Token> tokens) : toks_(std::move(tokens)) {}

    Suite suite() {
        Suite out;
        std::set<std::string, std::less<>> seen;
        while (peek().kind != Tok::End) {
            auto def = trigger();
            if (!seen.insert(def.id).second) throw DuplicateTriggerId(def.pos, def.id);
            out.push_back(std::move(def));
        }
        return out;
    }

private:
    const Token& peek(std::size_t ahead = 0) const {
        return toks_[std::min(i_ + ahead, toks_.size() - 1)];
    }
    const Token& next() {
        const Token& t = toks_[i_];
        if (i_ + 1 < toks_.size()) ++i_;
        return t;
    }

    bool at(std::string_view word, std::size_t ahead = 0) const {
        const Token& t = peek(ahead);
        return t.kind == Tok::Word && t.text == word;
    }

    [[noreturn]] void unexpected(std::vector<std::string> expected) const {
        const Token& t = peek();
        std::string what = t.kind == Tok::End ? "unexpected end of input" : "unexpected '" + t.text + "'";
        throw ParseError(t.pos, what, std::move(expected));
    }

    void expect(std::string_view word) {
        if (!at(word)) unexpected({std::string(word)});
        next();
    }

    std::string ident(const char* what) {
        const Token& t = peek();
        if (t.kind != Tok::Word || keywords().contains(t.text)) unexpected({what});
        return next().text;
    }

    int integer(int min, const char* what) {
        const Token& t = peek();
        if (t.kind != Tok::Number) unexpected({what});
        if (t.number != static_cast<double>(static_cast<long long>(t.number)) || t.number < min ||
            t.number > 1e9)
            throw ParseError(t.pos, std::string(what) + " must be an integer >= " + std::to_string(min));
        return static_cast<int>(next().number);
    }

    Key key() {
        const Token& t = peek();
        std::optional<Key> k = t.kind == Tok::Word ? parse_key(t.text) : std::nullopt;
        if (!k) unexpected({"up-arrow", "down-arrow", "left-arrow", "right-arrow", "space"});
        next();
        return *k;
    }

    TriggerDef trigger() {
        TriggerDef def;
        def.pos = peek().pos;
        expect("TRIGGER");
        def.id = ident("trigger id");
        expect("WHEN");
        def.conditions.push_back(condition());
        while (!at("AFTER")) {
            if (at("AND")) next();
            if (peek().kind == Tok::End) unexpected({"condition", "AFTER"});
            def.conditions.push_back(condition());
        }
        expect("AFTER");
        def.delay_steps = integer(0, "step count");
        expect("STEPS");
        expect("THEN");
        def.actions.push_back(action());
        while (at("DO") || at("IF") || at("THEN")) {
            if (at("THEN")) next();
            def.actions.push_back(action());
        }
        while (true) {
            bool* flag = nullptr;
            if (at("debounce")) flag = &def.flags.debounce;
            else if (at("one-shot")) flag = &def.flags.one_shot;
            else if (at("add-on-start")) flag = &def.flags.add_on_start;
            else break;
            if (*flag) throw ParseError(peek().pos, "flag '" + peek().text + "' given twice");
            *flag = true;
            next();
        }
        if (peek().kind != Tok::End && !at("TRIGGER"))
            unexpected({"DO", "IF", "debounce", "one-shot", "add-on-start", "TRIGGER", "end of input"});
        return def;
    }

    Condition condition() {
        if (at("Always")) {
            next();
            return Always{};
        }
        if (at(kCoin)) {
            next();
            return RandomCoin{};
        }
        if (at("isTouch")) {
            next();
            IsTouch t;
            t.a = ident("sprite");
            t.b = ident("sprite");
            return t;
        }
        if (at("spriteOnEdge")) {
            next();
            OnEdge e;
            e.sprite = ident("sprite");
            const Token& t = peek();
            auto side = t.kind == Tok::Word ? parse_side(t.text) : std::nullopt;
            if (!side) unexpected({"top", "bottom", "left", "right", "any"});
            next();
            e.side = *side;
            return e;
        }
        if (at("keyDown")) {
            next();
            return KeyDown{key()};
        }
        if (peek().kind == Tok::Word && !keywords().contains(peek().text) && at("isTouch", 1)) {
            IsTouch t;
            t.a = next().text;
            next();
            t.b = ident("sprite");
            return t;
        }
        if (peek().kind == Tok::Number || at("SAVED") ||
            (peek().kind == Tok::Word && !keywords().contains(peek().text))) {
            Compare c;
            c.lhs = operand();
            if (peek().kind != Tok::Op) unexpected({"=", "!=", "<", "<=", ">", ">="});
            c.op = next().op;
            c.rhs = operand();
            return c;
        }
        unexpected({"Always", "isTouch", "spriteOnEdge", "keyDown", std::string(kCoin), "comparison"});
    }

    Operand operand() {
        if (peek().kind == Tok::Number) return Literal{next().number};
        Read r;
        if (at("SAVED")) {
            next();
            r.saved = true;
        }
        std::string name = ident("property, variable or number");
        if (at("OF")) {
            next();
            std::string sprite = ident("sprite");
            if (auto p = parse_prop(name)) r.ref = PropRef{std::move(sprite), *p};
            else r.ref = VarRef{std::move(name), std::move(sprite)};
        } else {
            r.ref = VarRef{std::move(name), ""};
        }
        return r;
    }

    Action action() {
        if (at("DO")) {
            next();
            return Do{item()};
        }
        if (at("IF")) {
            next();
            IfThenElse ite;
            ite.cond = condition();
            expect("THEN");
            ite.then_item = item();
            expect("ELSE");
            ite.else_item = item();
            return ite;
        }
        unexpected({"DO", "IF"});
    }

    ActionItem item() {
        if (at("Nothing")) {
            next();
            return Nothing{};
        }
        if (at("Report")) {
            next();
            Report r;
            r.test_id = ident("test id");
            if (at("SUCC")) r.success = true;
            else if (at("FAIL")) r.success = false;
            else unexpected({"SUCC", "FAIL"});
            next();
            return r;
        }
        if (at("Input")) {
            next();
            InputKey in;
            in.key = key();
            expect("Key");
            if (at("FOR")) {
                next();
                in.steps = integer(1, "input duration");
                expect("STEPS");
            }
            return in;
        }
        if (at("AddTrigger")) {
            next();
            return AddTrigger{ident("trigger id")};
        }
        if (at("RemoveTrigger")) {
            next();
            return RemoveTrigger{ident("trigger id")};
        }
        unexpected({"Nothing", "Report", "Input", "AddTrigger", "RemoveTrigger"});
    }

    std::vector<Token> toks_;
    std::size_t i_ = 0;
};

}  // namespace

Suite parse_suite(std::string_view text) {
    Parser parser(Lexer(text).run());
    return parser.suite();
}

Suite parse_suite_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open suite file '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_suite(buf.str());
}

}  // namespace stagecheck::dsl
