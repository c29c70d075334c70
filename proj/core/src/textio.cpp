#include "bvinf/textio.hpp"

#include <cctype>
#include <sstream>

namespace bvinf {

namespace {

enum class Tok { End, Num, Name, Plus, Minus, Star, Caret, Slash, LPar, RPar, DDeriv };

struct Lexer {
    explicit Lexer(const std::string& s) : src(s) { advance(); }

    Tok kind = Tok::End;
    std::string text;

    void advance() {
        while (pos < src.size() && std::isspace(static_cast<unsigned char>(src[pos]))) ++pos;
        text.clear();
        if (pos >= src.size()) {
            kind = Tok::End;
            return;
        }
        const char c = src[pos];
        // "d/d" introduces a derivative when followed by an identifier.
        if (c == 'd' && pos + 3 < src.size() && src[pos + 1] == '/' && src[pos + 2] == 'd' &&
            (std::isalpha(static_cast<unsigned char>(src[pos + 3])) || src[pos + 3] == '_')) {
            kind = Tok::DDeriv;
            pos += 3;
            return;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            kind = Tok::Num;
            while (pos < src.size() && std::isdigit(static_cast<unsigned char>(src[pos])))
                text += src[pos++];
            return;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            kind = Tok::Name;
            while (pos < src.size() &&
                   (std::isalnum(static_cast<unsigned char>(src[pos])) || src[pos] == '_'))
                text += src[pos++];
            return;
        }
        ++pos;
        switch (c) {
            case '+': kind = Tok::Plus; return;
            case '-': kind = Tok::Minus; return;
            case '*': kind = Tok::Star; return;
            case '^': kind = Tok::Caret; return;
            case '/': kind = Tok::Slash; return;
            case '(': kind = Tok::LPar; return;
            case ')': kind = Tok::RPar; return;
            default:
                throw ParseError(std::string("unexpected character '") + c + "' in expression");
        }
    }

    const std::string& src;
    std::size_t pos = 0;
};

Rational lex_rational(Lexer& lx) {
    bool neg = false;
    bool parenthesized = false;
    if (lx.kind == Tok::LPar) {
        parenthesized = true;
        lx.advance();
    }
    if (lx.kind == Tok::Minus) {
        neg = true;
        lx.advance();
    }
    if (lx.kind != Tok::Num) throw ParseError("expected a number");
    Rational num = rational_from_string(lx.text);
    lx.advance();
    if (lx.kind == Tok::Slash) {
        lx.advance();
        if (lx.kind != Tok::Num) throw ParseError("expected a denominator after '/'");
        Rational den = rational_from_string(lx.text);
        if (den == 0) throw ParseError("zero denominator");
        num /= den;
        lx.advance();
    }
    if (parenthesized) {
        if (lx.kind != Tok::RPar) throw ParseError("expected ')'");
        lx.advance();
    }
    return neg ? -num : num;
}

int lex_exponent(Lexer& lx) {
    // Caller consumed '^'.
    bool neg = false;
    if (lx.kind == Tok::Minus) {
        neg = true;
        lx.advance();
    }
    if (lx.kind != Tok::Num) throw ParseError("expected an integer exponent after '^'");
    const long e = std::stol(lx.text);
    lx.advance();
    return int(neg ? -e : e);
}

struct TermValue {
    Rational coeff = Rational(1);
    AlgebraElement mono;  // product of generator factors in written order
    int hbar_exp = 0;
};

/// Parses `factor ('*' factor)*` stopping at +, -, d/d, or end. Generator
/// factors are multiplied in written order, so Koszul signs and odd squares
/// are handled by the element algebra.
TermValue lex_term(Lexer& lx, const SigPtr& sig, bool allow_hbar) {
    TermValue out;
    out.mono = AlgebraElement::unit(sig);
    bool any = false;
    for (;;) {
        if (lx.kind == Tok::Num || lx.kind == Tok::LPar) {
            out.coeff *= lex_rational(lx);
            any = true;
        } else if (lx.kind == Tok::Name) {
            const std::string name = lx.text;
            lx.advance();
            int e = 1;
            if (lx.kind == Tok::Caret) {
                lx.advance();
                e = lex_exponent(lx);
            }
            if (name == "h") {
                if (!allow_hbar) throw ParseError("'h' is not allowed in this context");
                out.hbar_exp += e;
            } else {
                auto gi = sig->find_generator(name);
                if (!gi) throw ParseError("unknown generator '" + name + "'");
                if (e < 0) throw ParseError("negative exponent on generator '" + name + "'");
                const AlgebraElement g = AlgebraElement::generator(sig, *gi);
                for (int k = 0; k < e; ++k) out.mono = out.mono * g;
            }
            any = true;
        } else {
            break;
        }
        if (lx.kind == Tok::Star) {
            lx.advance();
            continue;
        }
        break;
    }
    if (!any) throw ParseError("expected a term");
    return out;
}

LaurentSeries parse_sum(const SigPtr& sig, const std::string& text, bool allow_hbar) {
    Lexer lx(text);
    LaurentSeries acc = LaurentSeries::zero(sig);
    bool neg = false;
    if (lx.kind == Tok::Minus) {
        neg = true;
        lx.advance();
    }
    for (;;) {
        TermValue t = lex_term(lx, sig, allow_hbar);
        AlgebraElement e = t.mono.scaled(neg ? -t.coeff : t.coeff);
        if (!e.is_zero()) acc += LaurentSeries::from_element(e, t.hbar_exp);
        if (lx.kind == Tok::Plus) {
            neg = false;
            lx.advance();
            continue;
        }
        if (lx.kind == Tok::Minus) {
            neg = true;
            lx.advance();
            continue;
        }
        break;
    }
    if (lx.kind != Tok::End) throw ParseError("trailing input in expression '" + text + "'");
    return acc;
}

}  // namespace

AlgebraElement parse_element(const SigPtr& sig, const std::string& text) {
    LaurentSeries s = parse_sum(sig, text, /*allow_hbar=*/false);
    return s.coefficient(0);
}

LaurentSeries parse_laurent(const SigPtr& sig, const std::string& text) {
    return parse_sum(sig, text, /*allow_hbar=*/true);
}

Monomial parse_monomial(const SigPtr& sig, const std::string& text) {
    AlgebraElement e = parse_element(sig, text);
    if (e.terms().size() != 1 || e.terms().begin()->second != 1)
        throw ParseError("expected a single monomial with coefficient 1: '" + text + "'");
    return e.terms().begin()->first;
}

ScalarLaurent parse_scalar_laurent(const std::string& text) {
    static const SigPtr scalar_sig =
        make_signature("scalars", 1, {}, Truncation{0, 64, 0, 64});
    LaurentSeries s = parse_sum(scalar_sig, text, /*allow_hbar=*/true);
    return s.scalar_part();
}

std::string scalar_laurent_to_string(const ScalarLaurent& s) { return s.to_string(); }

std::vector<ParsedOperatorTerm> parse_operator_terms(const SigPtr& sig, const std::string& text) {
    Lexer lx(text);
    std::vector<ParsedOperatorTerm> out;
    bool neg = false;
    if (lx.kind == Tok::Minus) {
        neg = true;
        lx.advance();
    }
    for (;;) {
        Rational coeff_num(1);
        AlgebraElement coeff_mono = AlgebraElement::unit(sig);
        bool have_coeff_factor = false;
        while (lx.kind == Tok::Num || lx.kind == Tok::LPar || lx.kind == Tok::Name) {
            TermValue t = lex_term(lx, sig, /*allow_hbar=*/false);
            coeff_num *= t.coeff;
            coeff_mono = coeff_mono * t.mono;
            have_coeff_factor = true;
            if (lx.kind == Tok::Star) lx.advance();
        }
        ParsedOperatorTerm term;
        while (lx.kind == Tok::DDeriv) {
            lx.advance();
            if (lx.kind != Tok::Name) throw ParseError("expected a generator name after d/d");
            auto gi = sig->find_generator(lx.text);
            if (!gi) throw ParseError("unknown generator '" + lx.text + "' after d/d");
            term.derivs.push_back(*gi);
            lx.advance();
            if (lx.kind == Tok::Star) lx.advance();
        }
        if (!have_coeff_factor && term.derivs.empty())
            throw ParseError("expected an operator term");
        term.coeff = coeff_mono.scaled(neg ? -coeff_num : coeff_num);
        if (!(term.coeff.is_zero() && term.derivs.empty())) out.push_back(std::move(term));
        if (lx.kind == Tok::Plus) {
            neg = false;
            lx.advance();
            continue;
        }
        if (lx.kind == Tok::Minus) {
            neg = true;
            lx.advance();
            continue;
        }
        break;
    }
    if (lx.kind != Tok::End) throw ParseError("trailing input in operator expression '" + text + "'");
    // Drop explicit zero terms such as the literal "0".
    std::vector<ParsedOperatorTerm> filtered;
    for (auto& t : out)
        if (!t.coeff.is_zero()) filtered.push_back(std::move(t));
    return filtered;
}

}  // namespace bvinf
