#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

namespace prox {

enum class PrimitiveType { String, Integer, Double, Boolean, Date };

std::string_view toString(PrimitiveType type);
std::optional<PrimitiveType> primitiveFromString(std::string_view name);

inline bool isNumeric(PrimitiveType type) {
    return type == PrimitiveType::Integer || type == PrimitiveType::Double;
}

/// Calendar date stored as days since 1970-01-01.
struct Date {
    std::int32_t days = 0;

    static std::optional<Date> fromIso(std::string_view text);
    std::string iso() const;

    auto operator<=>(const Date&) const = default;
};

/// A typed scalar. Alternative order matches PrimitiveType.
using Value = std::variant<std::string, std::int64_t, double, bool, Date>;

PrimitiveType typeOf(const Value& value);

/// Literal in the condition language's concrete syntax: 'text', 42, 3.5,
/// TRUE, DATE '2024-01-10'. Doubles always carry a '.' or exponent so the
/// literal reparses to the same alternative.
std::string toLiteral(const Value& value);

/// Plain rendering used in tables and dumps (no quotes, dates bare).
std::string toPlain(const Value& value);

/// Shortest round-trip decimal for a finite double, always with a fraction
/// part or exponent ("4.0", "3.5", "1e+20").
std::string formatDouble(double value);

/// Converts `value` for storage in a slot of type `target`. Integer widens
/// to Double; everything else must match exactly.
std::optional<Value> coerce(const Value& value, PrimitiveType target);

/// Parses a bare scalar (as found in fixtures and domain files) for a
/// slot of the given type. Returns nullopt if the text does not fit.
std::optional<Value> parseScalar(std::string_view text, PrimitiveType type);

}  // namespace prox
