#pragma once

// Token-level parser shared by the lang front ends and the Gherkin
// translator, which drives the same term/condition productions over a
// different outer grammar.

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "prox/lang/ast.hpp"
#include "prox/lang/parser.hpp"

namespace prox::lang::detail {

enum class TokenKind { Identifier, Keyword, Integer, Double, String, Placeholder, Punct, End };

enum class Keyword {
    None,
    Select,
    From,
    Where,
    And,
    Or,
    Not,
    Tuple,
    In,
    Insert,
    Into,
    Delete,
    Update,
    Set,
    Case,
    When,
    Then,
    Else,
    True,
    False,
};

struct Token {
    TokenKind kind = TokenKind::End;
    std::string text;
    Keyword keyword = Keyword::None;
    std::size_t line = 1;
    std::size_t column = 1;
};

std::vector<Token> tokenize(std::string_view text);

bool equalsIgnoreCase(std::string_view a, std::string_view b);

class TokenParser {
public:
    TokenParser(std::vector<Token> tokens, Syntax syntax);

    Term term();
    ConditionExpr condition();
    FilterExpr filter();
    QueryExpr query();
    std::vector<EffectStmt> effect();
    EffectStmt statement();

    const Token& peek(std::size_t ahead = 0) const;
    const Token& advance();
    bool atEnd() const { return peek().kind == TokenKind::End; }
    bool atKeyword(Keyword kw, std::size_t ahead = 0) const;
    bool atPunct(std::string_view punct, std::size_t ahead = 0) const;
    bool atWord(std::string_view word, std::size_t ahead = 0) const;  // identifier, case-insensitive
    bool acceptKeyword(Keyword kw);
    bool acceptPunct(std::string_view punct);
    void expectKeyword(Keyword kw, std::string_view what);
    void expectPunct(std::string_view punct);
    std::string expectIdentifier(std::string_view what);
    void expectEnd();
    [[noreturn]] void fail(const Token& at, const std::string& message) const;

    std::size_t position() const { return pos_; }
    void rewind(std::size_t pos) { pos_ = pos; }

private:
    ConditionExpr disjunctive();
    ConditionExpr conjunctive();
    ConditionExpr primaryCondition();
    ConditionExpr atomCondition();
    bool atComparison(std::size_t ahead = 0) const;
    bool atArithmetic(std::size_t ahead = 0) const;
    CompareOp comparison();
    Term additive();
    Term multiplicative();
    Term primaryTerm();
    TupleIn tupleIn();
    std::vector<PlaceholderAssignment> placeholderAssignments();

    std::vector<Token> tokens_;
    std::size_t pos_ = 0;
    Syntax syntax_;
};

}  // namespace prox::lang::detail
