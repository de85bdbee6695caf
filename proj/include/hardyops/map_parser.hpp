#pragma once

#include <charconv>
#include <cmath>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "hardyops/errors.hpp"
#include "hardyops/self_map.hpp"

namespace hardyops {

// Map-spec grammar (also shipped in docs/map-grammar.md):
//
//   map      := "compose" "(" map ";" map ")" | family pair*
//   family   := "affine" | "mobius" | "monomial" | "poly" | "blaschke" | "contact"
//   pair     := key "=" value
//   value    := complex | list
//   list     := "[" [ complex ("," complex)* ] "]"
//   complex  := real | real sign imag "i" | [sign] imag "i" | [sign] "i"
//
// Complex literals contain no interior whitespace; pairs are separated by
// whitespace. compose(outer ; inner) applies the outer map after the inner.

namespace detail {

class MapParser {
public:
    explicit MapParser(std::string_view text) : text_(text) {}

    SelfMap parse() {
        SelfMap m = parse_map();
        skip_ws();
        if (pos_ < text_.size()) fail("unexpected trailing input");
        return m;
    }

    std::vector<Complex> parse_list_only() {
        skip_ws();
        if (peek() != '[') fail("expected '[' to open a coefficient list");
        Value v = parse_value();
        skip_ws();
        if (pos_ < text_.size()) fail("unexpected trailing input");
        return std::get<std::vector<Complex>>(std::move(v));
    }

private:
    using Value = std::variant<Complex, std::vector<Complex>>;
    struct Pair {
        std::string key;
        Value value;
        int line, column;
    };

    std::string_view text_;
    std::size_t pos_ = 0;
    int line_ = 1, column_ = 1;

    [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, line_, column_); }
    [[noreturn]] static void fail_at(const std::string& msg, int line, int column) {
        throw ParseError(msg, line, column);
    }

    char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }

    char advance() {
        const char c = text_[pos_++];
        if (c == '\n') {
            ++line_;
            column_ = 1;
        } else {
            ++column_;
        }
        return c;
    }

    void skip_ws() {
        while (pos_ < text_.size() && (peek() == ' ' || peek() == '\t' || peek() == '\n' || peek() == '\r'))
            advance();
    }

    void expect(char c, const char* what) {
        skip_ws();
        if (peek() != c) fail(std::string("expected '") + c + "' " + what);
        advance();
    }

    static bool ident_start(char c) {
        return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
    }
    static bool ident_char(char c) { return ident_start(c) || (c >= '0' && c <= '9'); }

    std::string parse_identifier(const char* what) {
        skip_ws();
        if (!ident_start(peek())) fail(std::string("expected ") + what);
        std::string out;
        while (pos_ < text_.size() && ident_char(peek())) out += advance();
        return out;
    }

    bool try_parse_real(double& out) {
        std::size_t start = pos_;
        int start_line = line_, start_column = column_;
        bool negative = false;
        if (peek() == '+' || peek() == '-') {
            negative = peek() == '-';
            advance();
        }
        const char* first = text_.data() + pos_;
        const char* last = text_.data() + text_.size();
        double value = 0.0;
        auto [next, ec] = std::from_chars(first, last, value);
        if (ec != std::errc() || next == first) {
            pos_ = start;
            line_ = start_line;
            column_ = start_column;
            return false;
        }
        for (const char* p = first; p != next; ++p) advance();
        out = negative ? -value : value;
        return true;
    }

    Complex parse_complex() {
        skip_ws();
        const int l = line_, c = column_;
        double first = 0.0;
        if (!try_parse_real(first)) {
            // [sign] i
            double sign = 1.0;
            if (peek() == '+' || peek() == '-') sign = advance() == '-' ? -1.0 : 1.0;
            if (peek() == 'i') {
                advance();
                return Complex(0.0, sign);
            }
            fail_at("expected a number", l, c);
        }
        if (peek() == 'i') {
            advance();
            return Complex(0.0, first);
        }
        if (peek() == '+' || peek() == '-') {
            const double sign = advance() == '-' ? -1.0 : 1.0;
            double second = 1.0;
            if (!try_parse_real(second) && peek() != 'i') fail("expected imaginary part");
            if (peek() != 'i') fail("expected 'i' after imaginary part");
            advance();
            return Complex(first, sign * second);
        }
        return Complex(first, 0.0);
    }

    Value parse_value() {
        skip_ws();
        if (peek() == '[') {
            advance();
            std::vector<Complex> items;
            skip_ws();
            if (peek() == ']') {
                advance();
                return items;
            }
            while (true) {
                items.push_back(parse_complex());
                skip_ws();
                if (peek() == ',') {
                    advance();
                    continue;
                }
                if (peek() == ']') {
                    advance();
                    return items;
                }
                fail("expected ',' or ']' in list");
            }
        }
        return parse_complex();
    }

    std::vector<Pair> parse_pairs() {
        std::vector<Pair> pairs;
        while (true) {
            skip_ws();
            if (!ident_start(peek())) return pairs;
            const int l = line_, c = column_;
            std::string key = parse_identifier("a parameter name");
            expect('=', "after parameter name");
            Value v = parse_value();
            for (const Pair& p : pairs)
                if (p.key == key) fail_at("duplicate parameter '" + key + "'", l, c);
            pairs.push_back(Pair{std::move(key), std::move(v), l, c});
        }
    }

    struct PairSet {
        std::vector<Pair> pairs;
        int family_line, family_column;
        const std::string& family;

        const Pair* find(const std::string& key) const {
            for (const Pair& p : pairs)
                if (p.key == key) return &p;
            return nullptr;
        }
        Complex scalar(const std::string& key) const {
            const Pair* p = require(key);
            if (!std::holds_alternative<Complex>(p->value))
                fail_at("parameter '" + key + "' must be a scalar", p->line, p->column);
            return std::get<Complex>(p->value);
        }
        Complex scalar_or(const std::string& key, Complex fallback) const {
            return find(key) ? scalar(key) : fallback;
        }
        std::vector<Complex> list(const std::string& key) const {
            const Pair* p = require(key);
            if (!std::holds_alternative<std::vector<Complex>>(p->value))
                fail_at("parameter '" + key + "' must be a list", p->line, p->column);
            return std::get<std::vector<Complex>>(p->value);
        }
        double real_scalar(const std::string& key) const {
            const Complex v = scalar(key);
            if (v.imag() != 0.0)
                fail_at("parameter '" + key + "' must be real", require(key)->line,
                        require(key)->column);
            return v.real();
        }
        int int_scalar(const std::string& key) const {
            const double v = real_scalar(key);
            if (v != std::floor(v) || std::abs(v) > 1e9)
                fail_at("parameter '" + key + "' must be an integer", require(key)->line,
                        require(key)->column);
            return static_cast<int>(v);
        }
        const Pair* require(const std::string& key) const {
            const Pair* p = find(key);
            if (!p) fail_at("missing required parameter '" + key + "' for " + family,
                            family_line, family_column);
            return p;
        }
        void allow_only(std::initializer_list<const char*> keys) const {
            for (const Pair& p : pairs) {
                bool known = false;
                for (const char* k : keys) known = known || p.key == k;
                if (!known) fail_at("unknown parameter '" + p.key + "' for " + family, p.line, p.column);
            }
        }
    };

    SelfMap parse_map() {
        skip_ws();
        const int l = line_, c = column_;
        const std::string name = parse_identifier("a map name");

        if (name == "compose") {
            expect('(', "after compose");
            SelfMap outer = parse_map();
            expect(';', "between composed maps");
            SelfMap inner = parse_map();
            expect(')', "to close compose");
            return SelfMap::composed(std::move(outer), std::move(inner));
        }

        PairSet set{parse_pairs(), l, c, name};
        try {
            if (name == "affine") {
                set.allow_only({"a", "b"});
                return SelfMap::affine(set.scalar("a"), set.scalar_or("b", Complex(0.0)));
            }
            if (name == "mobius") {
                set.allow_only({"lambda"});
                return SelfMap::mobius(set.scalar("lambda"));
            }
            if (name == "monomial") {
                set.allow_only({"k", "scale"});
                return SelfMap::monomial(set.int_scalar("k"), set.scalar_or("scale", Complex(1.0)));
            }
            if (name == "poly") {
                set.allow_only({"coeffs"});
                return SelfMap::poly(set.list("coeffs"));
            }
            if (name == "blaschke") {
                set.allow_only({"zeros", "rotation"});
                return SelfMap::blaschke(set.list("zeros"), set.scalar_or("rotation", Complex(1.0)));
            }
            if (name == "contact") {
                set.allow_only({"alpha"});
                return SelfMap::contact(set.real_scalar("alpha"));
            }
        } catch (const ParseError&) {
            throw;
        } catch (const Error& e) {
            fail_at(e.what(), l, c);
        }
        fail_at("unknown map family '" + name + "'", l, c);
    }
};

}  // namespace detail

/// Parses a map-spec string. Throws ParseError (with 1-based line and
/// column) on syntax errors and on parameters outside their family's range.
inline SelfMap parse_map(std::string_view text) { return detail::MapParser(text).parse(); }

/// Parses a bracketed list of complex literals, e.g. "[0,1,-0.5+0.25i]".
inline std::vector<Complex> parse_complex_list(std::string_view text) {
    return detail::MapParser(text).parse_list_only();
}

}  // namespace hardyops
