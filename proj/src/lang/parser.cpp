#include "prox/lang/parser.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <map>

#include "lang/token_parser.hpp"
#include "prox/error.hpp"
#include "prox/lang/types.hpp"

namespace prox::lang {

namespace detail {

namespace {

const std::map<std::string, Keyword, std::less<>>& keywordTable() {
    static const std::map<std::string, Keyword, std::less<>> table = {
        {"SELECT", Keyword::Select}, {"FROM", Keyword::From},     {"WHERE", Keyword::Where},
        {"AND", Keyword::And},       {"OR", Keyword::Or},         {"NOT", Keyword::Not},
        {"TUPLE", Keyword::Tuple},   {"IN", Keyword::In},         {"INSERT", Keyword::Insert},
        {"INTO", Keyword::Into},     {"DELETE", Keyword::Delete}, {"UPDATE", Keyword::Update},
        {"SET", Keyword::Set},       {"CASE", Keyword::Case},     {"WHEN", Keyword::When},
        {"THEN", Keyword::Then},     {"ELSE", Keyword::Else},     {"TRUE", Keyword::True},
        {"FALSE", Keyword::False},
    };
    return table;
}

bool isIdentStart(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool isIdentChar(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }
bool isDigit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }

std::string upper(std::string_view text) {
    std::string out(text);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    return out;
}

}  // namespace

bool equalsIgnoreCase(std::string_view a, std::string_view b) {
    return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
               return std::tolower(static_cast<unsigned char>(x)) == std::tolower(static_cast<unsigned char>(y));
           });
}

std::vector<Token> tokenize(std::string_view text) {
    std::vector<Token> out;
    std::size_t i = 0;
    std::size_t line = 1;
    std::size_t lineStart = 0;
    auto make = [&](TokenKind kind, std::size_t start, std::string tokenText) {
        Token t;
        t.kind = kind;
        t.text = std::move(tokenText);
        t.line = line;
        t.column = start - lineStart + 1;
        return t;
    };
    while (i < text.size()) {
        char c = text[i];
        if (c == '\n') {
            ++line;
            lineStart = ++i;
            continue;
        }
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
            continue;
        }
        std::size_t start = i;
        if (isIdentStart(c)) {
            while (i < text.size() && isIdentChar(text[i])) {
                ++i;
            }
            std::string word(text.substr(start, i - start));
            auto it = keywordTable().find(upper(word));
            if (it != keywordTable().end()) {
                Token t = make(TokenKind::Keyword, start, std::move(word));
                t.keyword = it->second;
                out.push_back(std::move(t));
            } else {
                out.push_back(make(TokenKind::Identifier, start, std::move(word)));
            }
            continue;
        }
        if (isDigit(c)) {
            bool isDouble = false;
            while (i < text.size() && isDigit(text[i])) {
                ++i;
            }
            if (i + 1 < text.size() && text[i] == '.' && isDigit(text[i + 1])) {
                isDouble = true;
                ++i;
                while (i < text.size() && isDigit(text[i])) {
                    ++i;
                }
            }
            if (i < text.size() && (text[i] == 'e' || text[i] == 'E')) {
                std::size_t j = i + 1;
                if (j < text.size() && (text[j] == '+' || text[j] == '-')) {
                    ++j;
                }
                if (j < text.size() && isDigit(text[j])) {
                    isDouble = true;
                    i = j;
                    while (i < text.size() && isDigit(text[i])) {
                        ++i;
                    }
                }
            }
            out.push_back(make(isDouble ? TokenKind::Double : TokenKind::Integer, start,
                               std::string(text.substr(start, i - start))));
            continue;
        }
        if (c == '\'') {
            std::string value;
            ++i;
            bool closed = false;
            while (i < text.size()) {
                if (text[i] == '\'') {
                    if (i + 1 < text.size() && text[i + 1] == '\'') {
                        value += '\'';
                        i += 2;
                        continue;
                    }
                    ++i;
                    closed = true;
                    break;
                }
                if (text[i] == '\n') {
                    break;
                }
                value += text[i++];
            }
            if (!closed) {
                throw ParseError(line, start - lineStart + 1, "unterminated string literal");
            }
            out.push_back(make(TokenKind::String, start, std::move(value)));
            continue;
        }
        if (c == '@') {
            ++i;
            if (i >= text.size() || !isIdentStart(text[i])) {
                throw ParseError(line, start - lineStart + 1, "expected placeholder name after '@'");
            }
            while (i < text.size() && isIdentChar(text[i])) {
                ++i;
            }
            out.push_back(make(TokenKind::Placeholder, start, std::string(text.substr(start + 1, i - start - 1))));
            continue;
        }
        static constexpr std::string_view twoChar[] = {"!=", "<>", "<=", ">="};
        bool matched = false;
        for (auto op : twoChar) {
            if (text.substr(i, 2) == op) {
                out.push_back(make(TokenKind::Punct, start, std::string(op == "<>" ? "!=" : op)));
                i += 2;
                matched = true;
                break;
            }
        }
        if (matched) {
            continue;
        }
        static constexpr std::string_view oneChar = "(),.;=<>+-*/";
        if (oneChar.find(c) != std::string_view::npos) {
            out.push_back(make(TokenKind::Punct, start, std::string(1, c)));
            ++i;
            continue;
        }
        throw ParseError(line, start - lineStart + 1, std::string("unexpected character '") + c + "'");
    }
    out.push_back(make(TokenKind::End, i, ""));
    return out;
}

TokenParser::TokenParser(std::vector<Token> tokens, Syntax syntax) : tokens_(std::move(tokens)), syntax_(syntax) {
    if (tokens_.empty() || tokens_.back().kind != TokenKind::End) {
        tokens_.push_back(Token{});
    }
}

const Token& TokenParser::peek(std::size_t ahead) const {
    std::size_t index = std::min(pos_ + ahead, tokens_.size() - 1);
    return tokens_[index];
}

const Token& TokenParser::advance() {
    const Token& t = tokens_[pos_];
    if (pos_ + 1 < tokens_.size()) {
        ++pos_;
    }
    return t;
}

bool TokenParser::atKeyword(Keyword kw, std::size_t ahead) const {
    const Token& t = peek(ahead);
    return t.kind == TokenKind::Keyword && t.keyword == kw;
}

bool TokenParser::atPunct(std::string_view punct, std::size_t ahead) const {
    const Token& t = peek(ahead);
    return t.kind == TokenKind::Punct && t.text == punct;
}

bool TokenParser::atWord(std::string_view word, std::size_t ahead) const {
    const Token& t = peek(ahead);
    return t.kind == TokenKind::Identifier && equalsIgnoreCase(t.text, word);
}

bool TokenParser::acceptKeyword(Keyword kw) {
    if (atKeyword(kw)) {
        advance();
        return true;
    }
    return false;
}

bool TokenParser::acceptPunct(std::string_view punct) {
    if (atPunct(punct)) {
        advance();
        return true;
    }
    return false;
}

void TokenParser::expectKeyword(Keyword kw, std::string_view what) {
    if (!acceptKeyword(kw)) {
        fail(peek(), "expected " + std::string(what));
    }
}

void TokenParser::expectPunct(std::string_view punct) {
    if (!acceptPunct(punct)) {
        fail(peek(), "expected '" + std::string(punct) + "'");
    }
}

std::string TokenParser::expectIdentifier(std::string_view what) {
    if (peek().kind != TokenKind::Identifier) {
        fail(peek(), "expected " + std::string(what));
    }
    return advance().text;
}

void TokenParser::expectEnd() {
    if (!atEnd()) {
        fail(peek(), "unexpected '" + peek().text + "'");
    }
}

void TokenParser::fail(const Token& at, const std::string& message) const {
    std::string where = at.kind == TokenKind::End ? " at end of input" : "";
    throw ParseError(at.line, at.column, message + where);
}

// ---- terms -----------------------------------------------------------------

Term TokenParser::term() { return additive(); }

Term TokenParser::additive() {
    Term lhs = multiplicative();
    while (atPunct("+") || atPunct("-")) {
        ArithOp op = advance().text == "+" ? ArithOp::Add : ArithOp::Sub;
        Term rhs = multiplicative();
        lhs = arith(op, std::move(lhs), std::move(rhs));
    }
    return lhs;
}

Term TokenParser::multiplicative() {
    Term lhs = primaryTerm();
    while (atPunct("*") || atPunct("/")) {
        ArithOp op = advance().text == "*" ? ArithOp::Mul : ArithOp::Div;
        Term rhs = primaryTerm();
        lhs = arith(op, std::move(lhs), std::move(rhs));
    }
    return lhs;
}

namespace {

Value numberLiteral(const Token& token, bool negative, const TokenParser& parser) {
    std::string text = (negative ? "-" : "") + token.text;
    if (token.kind == TokenKind::Integer) {
        std::int64_t value = 0;
        auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
        if (ec != std::errc{} || ptr != text.data() + text.size()) {
            parser.fail(token, "integer literal out of range");
        }
        return value;
    }
    double value = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
        parser.fail(token, "malformed number");
    }
    return value;
}

}  // namespace

Term TokenParser::primaryTerm() {
    const Token& t = peek();
    if (t.kind == TokenKind::Punct && t.text == "(") {
        advance();
        Term inner = additive();
        expectPunct(")");
        return inner;
    }
    if (t.kind == TokenKind::Punct && t.text == "-") {
        advance();
        const Token& next = peek();
        if (next.kind == TokenKind::Integer || next.kind == TokenKind::Double) {
            advance();
            return constant(numberLiteral(next, true, *this));
        }
        Term operand = primaryTerm();
        return arith(ArithOp::Sub, constant(std::int64_t{0}), std::move(operand));
    }
    if (t.kind == TokenKind::Integer || t.kind == TokenKind::Double) {
        advance();
        return constant(numberLiteral(t, false, *this));
    }
    if (t.kind == TokenKind::String) {
        advance();
        return constant(t.text);
    }
    if (t.kind == TokenKind::Keyword && (t.keyword == Keyword::True || t.keyword == Keyword::False)) {
        advance();
        return constant(t.keyword == Keyword::True);
    }
    if (t.kind == TokenKind::Identifier) {
        if (equalsIgnoreCase(t.text, "DATE") && peek(1).kind == TokenKind::String) {
            advance();
            const Token& literal = advance();
            auto date = Date::fromIso(literal.text);
            if (!date) {
                fail(literal, "malformed date literal '" + literal.text + "'");
            }
            return constant(*date);
        }
        std::string name = advance().text;
        if (atPunct(".") && peek(1).kind == TokenKind::Identifier) {
            advance();
            std::string attr = advance().text;
            return attribute(std::move(name), std::move(attr));
        }
        return variable(std::move(name));
    }
    if (t.kind == TokenKind::Keyword && t.keyword == Keyword::Not) {
        fail(t, "negation is not part of the condition language");
    }
    fail(t, t.kind == TokenKind::End ? "expected a term" : "expected a term, found '" + t.text + "'");
}

// ---- conditions --------------------------------------------------------------

ConditionExpr TokenParser::condition() { return disjunctive(); }

ConditionExpr TokenParser::disjunctive() {
    std::vector<ConditionExpr> operands;
    operands.push_back(conjunctive());
    while (atKeyword(Keyword::Or)) {
        if (syntax_ == Syntax::Surface) {
            fail(peek(), "OR is not allowed in conditions (only conjunctions of atoms)");
        }
        advance();
        operands.push_back(conjunctive());
    }
    return disjunction(std::move(operands));
}

ConditionExpr TokenParser::conjunctive() {
    std::vector<ConditionExpr> operands;
    operands.push_back(primaryCondition());
    // AND followed by TUPLE belongs to the enclosing filter.
    while (atKeyword(Keyword::And) && !atKeyword(Keyword::Tuple, 1)) {
        advance();
        operands.push_back(primaryCondition());
    }
    return conjunction(std::move(operands));
}

bool TokenParser::atComparison(std::size_t ahead) const {
    const Token& t = peek(ahead);
    if (t.kind != TokenKind::Punct) {
        return false;
    }
    return t.text == "=" || t.text == "!=" || t.text == "<" || t.text == ">" || t.text == "<=" || t.text == ">=";
}

bool TokenParser::atArithmetic(std::size_t ahead) const {
    const Token& t = peek(ahead);
    return t.kind == TokenKind::Punct && (t.text == "+" || t.text == "-" || t.text == "*" || t.text == "/");
}

ConditionExpr TokenParser::primaryCondition() {
    const Token& t = peek();
    if (t.kind == TokenKind::Keyword && t.keyword == Keyword::Not) {
        fail(t, "negation is not part of the condition language");
    }
    if (t.kind == TokenKind::Keyword && (t.keyword == Keyword::True || t.keyword == Keyword::False) &&
        !atComparison(1) && !atArithmetic(1)) {
        advance();
        return t.keyword == Keyword::True ? trueConst() : falseConst();
    }
    if (t.kind == TokenKind::Punct && t.text == "(") {
        std::size_t mark = position();
        try {
            return atomCondition();
        } catch (const ParseError&) {
            rewind(mark);
        }
        advance();
        ConditionExpr inner = disjunctive();
        expectPunct(")");
        return inner;
    }
    return atomCondition();
}

CompareOp TokenParser::comparison() {
    if (!atComparison()) {
        fail(peek(), "expected comparison operator");
    }
    const std::string& op = advance().text;
    if (op == "=") return CompareOp::Eq;
    if (op == "!=") return CompareOp::Neq;
    if (op == "<") return CompareOp::Lt;
    if (op == ">") return CompareOp::Gt;
    if (op == "<=") return CompareOp::Le;
    return CompareOp::Ge;
}

ConditionExpr TokenParser::atomCondition() {
    Term lhs = term();
    CompareOp op = comparison();
    Term rhs = term();
    ConditionExpr result = atom(std::move(lhs), op, std::move(rhs));
    typecheck(result, literalsOnly());
    return result;
}

// ---- filters and queries -------------------------------------------------------

TupleIn TokenParser::tupleIn() {
    const Token& start = peek();
    expectKeyword(Keyword::Tuple, "TUPLE");
    expectPunct("(");
    TupleIn item;
    item.terms.push_back(term());
    while (acceptPunct(",")) {
        item.terms.push_back(term());
    }
    expectPunct(")");
    expectKeyword(Keyword::In, "IN");
    item.relation = expectIdentifier("relation name");
    expectPunct(".");
    if (acceptPunct("(")) {
        item.attributes.push_back(expectIdentifier("attribute name"));
        while (acceptPunct(",")) {
            item.attributes.push_back(expectIdentifier("attribute name"));
        }
        expectPunct(")");
    } else {
        item.attributes.push_back(expectIdentifier("attribute name"));
    }
    if (item.attributes.size() != item.terms.size()) {
        fail(start, "TUPLE arity " + std::to_string(item.terms.size()) + " does not match " +
                        std::to_string(item.attributes.size()) + " attribute(s)");
    }
    return item;
}

FilterExpr TokenParser::filter() {
    FilterExpr out;
    while (true) {
        if (atKeyword(Keyword::Tuple)) {
            out.conjuncts.emplace_back(tupleIn());
        } else {
            out.conjuncts.emplace_back(condition());
        }
        if (!acceptKeyword(Keyword::And)) {
            break;
        }
    }
    return out;
}

QueryExpr TokenParser::query() {
    expectKeyword(Keyword::Select, "SELECT");
    QueryExpr q;
    do {
        std::string first = expectIdentifier("attribute name");
        if (acceptPunct(".")) {
            q.select.push_back(AttributeRef{first, expectIdentifier("attribute name")});
        } else {
            q.select.push_back(AttributeRef{"", first});
        }
    } while (acceptPunct(","));
    expectKeyword(Keyword::From, "FROM");
    do {
        q.from.push_back(expectIdentifier("relation name"));
    } while (acceptPunct(","));
    if (acceptKeyword(Keyword::Where)) {
        q.where = filter();
    }
    if (q.from.size() == 1) {
        for (auto& item : q.select) {
            if (item.relation.empty()) {
                item.relation = q.from.front();
            }
        }
    }
    return q;
}

// ---- effects -------------------------------------------------------------------

std::vector<PlaceholderAssignment> TokenParser::placeholderAssignments() {
    std::vector<PlaceholderAssignment> out;
    do {
        if (peek().kind != TokenKind::Placeholder) {
            fail(peek(), "expected placeholder '@name'");
        }
        std::string name = advance().text;
        expectPunct("=");
        out.push_back(PlaceholderAssignment{std::move(name), term()});
    } while (acceptPunct(","));
    return out;
}

EffectStmt TokenParser::statement() {
    if (acceptKeyword(Keyword::Insert)) {
        Insert ins;
        ins.values.push_back(term());
        while (acceptPunct(",")) {
            ins.values.push_back(term());
        }
        expectKeyword(Keyword::Into, "INTO");
        ins.table = expectIdentifier("table name");
        return ins;
    }
    if (acceptKeyword(Keyword::Delete)) {
        expectKeyword(Keyword::From, "FROM");
        Delete del{trueConst(), expectIdentifier("table name")};
        expectKeyword(Keyword::Where, "WHERE (a key filter is required)");
        del.keyFilter = condition();
        return del;
    }
    if (acceptKeyword(Keyword::Update)) {
        ConditionalUpdate upd;
        upd.table = expectIdentifier("table name");
        expectKeyword(Keyword::Set, "SET");
        do {
            const Token& at = peek();
            std::string attr = expectIdentifier("attribute name");
            if (acceptPunct(".")) {
                if (attr != upd.table) {
                    fail(at, "SET may only name attributes of '" + upd.table + "'");
                }
                attr = expectIdentifier("attribute name");
            }
            expectPunct("=");
            if (peek().kind != TokenKind::Placeholder) {
                fail(peek(), "expected placeholder '@name'");
            }
            upd.set.push_back(SetItem{std::move(attr), advance().text});
        } while (acceptPunct(","));
        acceptKeyword(Keyword::Where);
        expectKeyword(Keyword::Case, "CASE");
        while (acceptKeyword(Keyword::When)) {
            UpdateBranch branch;
            branch.when = filter();
            expectKeyword(Keyword::Then, "THEN");
            branch.then = placeholderAssignments();
            upd.branches.push_back(std::move(branch));
        }
        if (!acceptKeyword(Keyword::Else)) {
            fail(peek(), "conditional update requires an ELSE branch");
        }
        upd.otherwise = placeholderAssignments();
        return upd;
    }
    if (peek().kind == TokenKind::Identifier) {
        std::string target = advance().text;
        if (acceptPunct(".")) {
            target += "." + expectIdentifier("attribute name");
        }
        expectPunct("=");
        return Assign{std::move(target), term()};
    }
    fail(peek(), "expected a statement (assignment, INSERT, DELETE or UPDATE)");
}

std::vector<EffectStmt> TokenParser::effect() {
    std::vector<EffectStmt> out;
    if (atEnd()) {
        return out;
    }
    out.push_back(statement());
    while (acceptPunct(";")) {
        if (atEnd()) {
            break;
        }
        out.push_back(statement());
    }
    expectEnd();
    return out;
}

}  // namespace detail

// ---- public API -------------------------------------------------------------------

using detail::TokenParser;

ConditionExpr parseCondition(std::string_view text, Syntax syntax) {
    TokenParser p(detail::tokenize(text), syntax);
    ConditionExpr out = p.condition();
    p.expectEnd();
    return out;
}

Term parseTerm(std::string_view text) {
    TokenParser p(detail::tokenize(text), Syntax::Surface);
    Term out = p.term();
    p.expectEnd();
    return out;
}

FilterExpr parseFilter(std::string_view text, Syntax syntax) {
    TokenParser p(detail::tokenize(text), syntax);
    FilterExpr out = p.filter();
    p.expectEnd();
    return out;
}

QueryExpr parseQuery(std::string_view text) {
    TokenParser p(detail::tokenize(text), Syntax::Surface);
    QueryExpr out = p.query();
    p.expectEnd();
    return out;
}

std::vector<EffectStmt> parseEffect(std::string_view text, const EffectContext& context) {
    TokenParser p(detail::tokenize(text), Syntax::Surface);
    std::vector<EffectStmt> out = p.effect();
    checkEffect(out, context);
    return out;
}

Value parseLiteral(std::string_view text) {
    Term t = parseTerm(text);
    if (const auto* c = std::get_if<Constant>(&t.node)) {
        return c->value;
    }
    throw ParseError(1, 1, "expected a literal, got '" + std::string(text) + "'");
}

}  // namespace prox::lang
