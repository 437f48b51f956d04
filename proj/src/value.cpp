#include "prox/value.hpp"

#include <array>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>

namespace prox {

namespace {

constexpr std::array<std::string_view, 5> kTypeNames = {"string", "integer", "double", "boolean", "date"};

}  // namespace

std::string_view toString(PrimitiveType type) {
    return kTypeNames[static_cast<std::size_t>(type)];
}

std::optional<PrimitiveType> primitiveFromString(std::string_view name) {
    for (std::size_t i = 0; i < kTypeNames.size(); ++i) {
        if (kTypeNames[i] == name) {
            return static_cast<PrimitiveType>(i);
        }
    }
    return std::nullopt;
}

std::optional<Date> Date::fromIso(std::string_view text) {
    if (text.size() != 10 || text[4] != '-' || text[7] != '-') {
        return std::nullopt;
    }
    auto field = [&](std::size_t pos, std::size_t len) -> std::optional<int> {
        int out = 0;
        auto [ptr, ec] = std::from_chars(text.data() + pos, text.data() + pos + len, out);
        if (ec != std::errc{} || ptr != text.data() + pos + len) {
            return std::nullopt;
        }
        return out;
    };
    auto y = field(0, 4);
    auto m = field(5, 2);
    auto d = field(8, 2);
    if (!y || !m || !d) {
        return std::nullopt;
    }
    std::chrono::year_month_day ymd{std::chrono::year{*y}, std::chrono::month{static_cast<unsigned>(*m)},
                                    std::chrono::day{static_cast<unsigned>(*d)}};
    if (!ymd.ok()) {
        return std::nullopt;
    }
    return Date{static_cast<std::int32_t>(std::chrono::sys_days{ymd}.time_since_epoch().count())};
}

std::string Date::iso() const {
    std::chrono::year_month_day ymd{std::chrono::sys_days{std::chrono::days{days}}};
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
    return buf;
}

PrimitiveType typeOf(const Value& value) {
    return static_cast<PrimitiveType>(value.index());
}

std::string formatDouble(double value) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
    std::string out(buf, ptr);
    if (out.find_first_of(".en") == std::string::npos) {
        out += ".0";
    }
    return out;
}

std::string toLiteral(const Value& value) {
    switch (typeOf(value)) {
    case PrimitiveType::String: {
        std::string out = "'";
        for (char c : std::get<std::string>(value)) {
            out += c;
            if (c == '\'') {
                out += '\'';
            }
        }
        return out + "'";
    }
    case PrimitiveType::Integer:
        return std::to_string(std::get<std::int64_t>(value));
    case PrimitiveType::Double:
        return formatDouble(std::get<double>(value));
    case PrimitiveType::Boolean:
        return std::get<bool>(value) ? "TRUE" : "FALSE";
    case PrimitiveType::Date:
        return "DATE '" + std::get<Date>(value).iso() + "'";
    }
    return {};
}

std::string toPlain(const Value& value) {
    switch (typeOf(value)) {
    case PrimitiveType::String:
        return std::get<std::string>(value);
    case PrimitiveType::Boolean:
        return std::get<bool>(value) ? "true" : "false";
    case PrimitiveType::Date:
        return std::get<Date>(value).iso();
    default:
        return toLiteral(value);
    }
}

std::optional<Value> coerce(const Value& value, PrimitiveType target) {
    PrimitiveType source = typeOf(value);
    if (source == target) {
        return value;
    }
    if (source == PrimitiveType::Integer && target == PrimitiveType::Double) {
        return Value{static_cast<double>(std::get<std::int64_t>(value))};
    }
    return std::nullopt;
}

std::optional<Value> parseScalar(std::string_view text, PrimitiveType type) {
    switch (type) {
    case PrimitiveType::String:
        return Value{std::string(text)};
    case PrimitiveType::Integer: {
        std::int64_t out = 0;
        auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
        if (ec != std::errc{} || ptr != text.data() + text.size()) {
            return std::nullopt;
        }
        return Value{out};
    }
    case PrimitiveType::Double: {
        double out = 0;
        auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
        if (ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(out)) {
            return std::nullopt;
        }
        return Value{out};
    }
    case PrimitiveType::Boolean:
        if (text == "true" || text == "TRUE" || text == "True") {
            return Value{true};
        }
        if (text == "false" || text == "FALSE" || text == "False") {
            return Value{false};
        }
        return std::nullopt;
    case PrimitiveType::Date:
        if (auto d = Date::fromIso(text)) {
            return Value{*d};
        }
        return std::nullopt;
    }
    return std::nullopt;
}

}  // namespace prox
