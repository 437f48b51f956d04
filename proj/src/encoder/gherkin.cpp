#include <algorithm>
#include <cctype>

#include "lang/token_parser.hpp"
#include "prox/encoder/encoder.hpp"
#include "prox/error.hpp"

namespace prox::encoder {

using lang::detail::Keyword;
using lang::detail::TokenParser;

namespace {

struct Arm {
    std::optional<lang::FilterExpr> when;  // nullopt for Otherwise
    std::vector<std::pair<std::string, lang::Term>> sets;
};

std::vector<std::pair<std::string, lang::Term>> setList(TokenParser& p, std::size_t clause) {
    std::vector<std::pair<std::string, lang::Term>> sets;
    do {
        p.expectKeyword(Keyword::Set, "'set'");
        std::string attr = p.expectIdentifier("attribute name after 'set'");
        if (!p.atWord("to")) {
            p.fail(p.peek(), "expected 'to' after 'set " + attr + "'");
        }
        p.advance();
        lang::Term value = p.term();
        bool duplicate = std::any_of(sets.begin(), sets.end(), [&](const auto& s) { return s.first == attr; });
        if (duplicate) {
            throw GherkinError(clause, "attribute '" + attr + "' is set twice");
        }
        sets.emplace_back(std::move(attr), std::move(value));
    } while (p.atKeyword(Keyword::And) && p.atKeyword(Keyword::Set, 1) && (p.advance(), true));
    return sets;
}

}  // namespace

bool isGherkin(std::string_view expression) {
    auto first = expression.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) {
        return false;
    }
    std::string_view head = expression.substr(first, 4);
    bool when = lang::detail::equalsIgnoreCase(head, "when");
    return when && (expression.size() == first + 4 || std::isspace(static_cast<unsigned char>(expression[first + 4])));
}

lang::ConditionalUpdate gherkinToUpdate(std::string_view expression, const std::string& table,
                                        const lang::EffectContext& context) {
    std::vector<Arm> arms;
    std::size_t clause = 1;
    try {
        TokenParser p(lang::detail::tokenize(expression), lang::Syntax::Surface);
        while (p.atKeyword(Keyword::When)) {
            p.advance();
            Arm arm;
            arm.when = p.filter();
            p.expectKeyword(Keyword::Then, "'Then'");
            arm.sets = setList(p, clause);
            arms.push_back(std::move(arm));
            ++clause;
        }
        if (!p.atWord("otherwise")) {
            if (p.atEnd()) {
                throw GherkinError(clause, "missing 'Otherwise' clause");
            }
            p.fail(p.peek(), "expected 'When' or 'Otherwise'");
        }
        p.advance();
        Arm otherwise;
        otherwise.sets = setList(p, clause);
        arms.push_back(std::move(otherwise));
        p.expectEnd();
    } catch (const ParseError& e) {
        throw GherkinError(clause, e.what());
    }

    lang::ConditionalUpdate update;
    update.table = table;
    for (const auto& arm : arms) {
        for (const auto& [attr, _] : arm.sets) {
            bool known = std::any_of(update.set.begin(), update.set.end(),
                                     [&](const lang::SetItem& item) { return item.attribute == attr; });
            if (!known) {
                update.set.push_back(lang::SetItem{attr, attr});
            }
        }
    }
    auto assignments = [&](const Arm& arm) {
        std::vector<lang::PlaceholderAssignment> out;
        for (const auto& item : update.set) {
            auto it = std::find_if(arm.sets.begin(), arm.sets.end(),
                                   [&](const auto& s) { return s.first == item.attribute; });
            out.push_back(lang::PlaceholderAssignment{
                item.placeholder, it != arm.sets.end() ? it->second : lang::variable(item.attribute)});
        }
        return out;
    };
    for (std::size_t i = 0; i + 1 < arms.size(); ++i) {
        update.branches.push_back(lang::UpdateBranch{*arms[i].when, assignments(arms[i])});
    }
    update.otherwise = assignments(arms.back());
    lang::checkEffect({update}, context);
    return update;
}

}  // namespace prox::encoder
