#include "lenreward/verify.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <cctype>
#include <optional>

namespace lenreward {

namespace {

using boost::multiprecision::cpp_int;

bool is_space(char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
    while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
    return s;
}

// Strips one enclosing layer: $...$ or \boxed{...}. The brace must close at
// the very end, so "\boxed{1}+\boxed{2}" stays untouched.
std::string_view strip_one_wrapper(std::string_view s, bool& changed) {
    changed = false;
    if (s.size() >= 2 && s.front() == '$' && s.back() == '$') {
        changed = true;
        return s.substr(1, s.size() - 2);
    }
    constexpr std::string_view kBoxed = "\\boxed{";
    if (s.size() > kBoxed.size() && s.substr(0, kBoxed.size()) == kBoxed && s.back() == '}') {
        int depth = 1;
        for (std::size_t i = kBoxed.size(); i < s.size(); ++i) {
            if (s[i] == '{') ++depth;
            else if (s[i] == '}' && --depth == 0) {
                if (i + 1 == s.size()) {
                    changed = true;
                    return s.substr(kBoxed.size(), s.size() - kBoxed.size() - 1);
                }
                return s;  // wrapper closes early; not enclosing
            }
        }
    }
    return s;
}

// Exact rational. Denominator is kept positive.
struct Rational {
    cpp_int num;
    cpp_int den;
};

bool consume_digits(std::string_view& s, std::string& out) {
    std::size_t i = 0;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
    if (i == 0) return false;
    out.append(s.substr(0, i));
    s.remove_prefix(i);
    return true;
}

int consume_sign(std::string_view& s) {
    if (!s.empty() && (s.front() == '+' || s.front() == '-')) {
        int sign = s.front() == '-' ? -1 : 1;
        s.remove_prefix(1);
        return sign;
    }
    return 1;
}

// sign? (digits [ "." digits* ] | "." digits); also used for the fraction parts.
std::optional<Rational> parse_decimal(std::string_view& s) {
    const int sign = consume_sign(s);
    std::string int_part;
    std::string frac_part;
    const bool has_int = consume_digits(s, int_part);
    if (!s.empty() && s.front() == '.') {
        s.remove_prefix(1);
        consume_digits(s, frac_part);
    }
    if (!has_int && frac_part.empty()) return std::nullopt;

    cpp_int num = int_part.empty() ? cpp_int(0) : cpp_int(int_part);
    cpp_int den = 1;
    for (char d : frac_part) {
        num = num * 10 + (d - '0');
        den *= 10;
    }
    if (sign < 0) num = -num;
    return Rational{num, den};
}

// Accepts "a", "a.b", ".b", "a/b" (one optional space around '/'; the
// canonical form has collapsed whitespace already).
std::optional<Rational> parse_rational(std::string_view s) {
    auto lhs = parse_decimal(s);
    if (!lhs) return std::nullopt;
    if (s.empty()) return lhs;

    if (!s.empty() && s.front() == ' ') s.remove_prefix(1);
    if (s.empty() || s.front() != '/') return std::nullopt;
    s.remove_prefix(1);
    if (!s.empty() && s.front() == ' ') s.remove_prefix(1);

    // rule out decimal points inside fraction parts: 0.5/2 falls back to strings
    if (lhs->den != 1) return std::nullopt;
    auto rhs = parse_decimal(s);
    if (!rhs || !s.empty() || rhs->den != 1) return std::nullopt;
    if (rhs->num == 0) return std::nullopt;  // zero denominator is not a rational

    cpp_int num = lhs->num;
    cpp_int den = rhs->num;
    if (den < 0) {
        num = -num;
        den = -den;
    }
    return Rational{num, den};
}

bool rational_equal(const Rational& a, const Rational& b) {
    return a.num * b.den == b.num * a.den;
}

}  // namespace

std::string canonicalize(std::string_view s) {
    // Lowercase and collapse whitespace first so unwrapping sees the final
    // spelling; otherwise "\BOXED{42}" would need two passes.
    std::string flat;
    flat.reserve(s.size());
    bool in_space = false;
    for (char c : trim(s)) {
        if (is_space(c)) {
            in_space = true;
            continue;
        }
        if (in_space && !flat.empty()) flat.push_back(' ');
        in_space = false;
        flat.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }

    std::string_view core = flat;
    for (bool changed = true; changed;) {
        core = trim(strip_one_wrapper(core, changed));
    }
    return std::string(core);
}

bool verify(const VerificationTask& task) {
    if (trim(task.predicted).empty()) {
        throw MalformedTaskError("predicted answer is empty");
    }
    if (trim(task.reference).empty()) {
        throw MalformedTaskError("reference answer is empty");
    }
    const std::string lhs = canonicalize(task.predicted);
    const std::string rhs = canonicalize(task.reference);

    const auto lhs_q = parse_rational(lhs);
    const auto rhs_q = parse_rational(rhs);
    if (lhs_q && rhs_q) return rational_equal(*lhs_q, *rhs_q);
    return lhs == rhs;
}

double outcome_reward(bool correct) { return correct ? 1.0 : -1.0; }

}  // namespace lenreward
