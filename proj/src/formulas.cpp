#include "kripke/formulas.hpp"

#include "kripke/errors.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <functional>
#include <type_traits>
#include <unordered_map>
#include <utility>

namespace kripke {

// ---------------------------------------------------------------------------
// PropFormula

PropFormula PropFormula::letter(std::string name)
{
    return PropFormula(std::make_shared<const Node>(Node{Kind::letter, std::move(name), nullptr, nullptr}));
}

PropFormula PropFormula::bottom()
{
    static const PropFormula bot(std::make_shared<const Node>(Node{Kind::bottom, {}, nullptr, nullptr}));
    return bot;
}

PropFormula PropFormula::binary(Kind kind, PropFormula lhs, PropFormula rhs)
{
    return PropFormula(std::make_shared<const Node>(Node{kind, {}, std::move(lhs.node_), std::move(rhs.node_)}));
}

PropFormula PropFormula::conj(PropFormula lhs, PropFormula rhs) { return binary(Kind::conj, std::move(lhs), std::move(rhs)); }
PropFormula PropFormula::disj(PropFormula lhs, PropFormula rhs) { return binary(Kind::disj, std::move(lhs), std::move(rhs)); }
PropFormula PropFormula::imp(PropFormula lhs, PropFormula rhs) { return binary(Kind::imp, std::move(lhs), std::move(rhs)); }

PropFormula::Kind PropFormula::kind() const { return node_->kind; }
const std::string& PropFormula::name() const { return node_->name; }
PropFormula PropFormula::lhs() const { return PropFormula(node_->lhs); }
PropFormula PropFormula::rhs() const { return PropFormula(node_->rhs); }

bool PropFormula::is_negation() const
{
    return node_->kind == Kind::imp && node_->rhs->kind == Kind::bottom;
}

bool operator==(const PropFormula& a, const PropFormula& b)
{
    if (a.node_ == b.node_) {
        return true;
    }
    if (a.kind() != b.kind()) {
        return false;
    }
    switch (a.kind()) {
    case PropFormula::Kind::letter:
        return a.name() == b.name();
    case PropFormula::Kind::bottom:
        return true;
    default:
        return a.lhs() == b.lhs() && a.rhs() == b.rhs();
    }
}

// ---------------------------------------------------------------------------
// SetFormula

SetFormula SetFormula::member(std::string lhs, std::string rhs)
{
    return SetFormula(std::make_shared<const Node>(Node{Kind::member, std::move(lhs), std::move(rhs), nullptr, nullptr}));
}

SetFormula SetFormula::equal(std::string lhs, std::string rhs)
{
    return SetFormula(std::make_shared<const Node>(Node{Kind::equal, std::move(lhs), std::move(rhs), nullptr, nullptr}));
}

SetFormula SetFormula::bottom()
{
    static const SetFormula bot(std::make_shared<const Node>(Node{Kind::bottom, {}, {}, nullptr, nullptr}));
    return bot;
}

SetFormula SetFormula::binary(Kind kind, SetFormula lhs, SetFormula rhs)
{
    return SetFormula(std::make_shared<const Node>(Node{kind, {}, {}, std::move(lhs.node_), std::move(rhs.node_)}));
}

SetFormula SetFormula::conj(SetFormula lhs, SetFormula rhs) { return binary(Kind::conj, std::move(lhs), std::move(rhs)); }
SetFormula SetFormula::disj(SetFormula lhs, SetFormula rhs) { return binary(Kind::disj, std::move(lhs), std::move(rhs)); }
SetFormula SetFormula::imp(SetFormula lhs, SetFormula rhs) { return binary(Kind::imp, std::move(lhs), std::move(rhs)); }

SetFormula SetFormula::exists(std::string var, SetFormula body)
{
    return SetFormula(std::make_shared<const Node>(Node{Kind::exists, std::move(var), {}, std::move(body.node_), nullptr}));
}

SetFormula SetFormula::forall(std::string var, SetFormula body)
{
    return SetFormula(std::make_shared<const Node>(Node{Kind::forall, std::move(var), {}, std::move(body.node_), nullptr}));
}

SetFormula SetFormula::iff(const SetFormula& lhs, const SetFormula& rhs)
{
    return conj(imp(lhs, rhs), imp(rhs, lhs));
}

SetFormula SetFormula::forall_in(std::string var, const std::string& set, SetFormula body)
{
    auto guard = member(var, set);
    return forall(std::move(var), imp(std::move(guard), std::move(body)));
}

SetFormula SetFormula::exists_in(std::string var, const std::string& set, SetFormula body)
{
    auto guard = member(var, set);
    return exists(std::move(var), conj(std::move(guard), std::move(body)));
}

SetFormula SetFormula::conj_all(const std::vector<SetFormula>& parts)
{
    if (parts.empty()) {
        return top();
    }
    SetFormula result = parts.back();
    for (auto it = parts.rbegin() + 1; it != parts.rend(); ++it) {
        result = conj(*it, std::move(result));
    }
    return result;
}

SetFormula SetFormula::disj_any(const std::vector<SetFormula>& parts)
{
    if (parts.empty()) {
        return bottom();
    }
    SetFormula result = parts.back();
    for (auto it = parts.rbegin() + 1; it != parts.rend(); ++it) {
        result = disj(*it, std::move(result));
    }
    return result;
}

SetFormula::Kind SetFormula::kind() const { return node_->kind; }
const std::string& SetFormula::left_var() const { return node_->left; }
const std::string& SetFormula::right_var() const { return node_->right; }
SetFormula SetFormula::lhs() const { return SetFormula(node_->lhs); }
SetFormula SetFormula::rhs() const { return SetFormula(node_->rhs); }

bool SetFormula::is_negation() const
{
    return node_->kind == Kind::imp && node_->rhs->kind == Kind::bottom;
}

bool operator==(const SetFormula& a, const SetFormula& b)
{
    if (a.node_ == b.node_) {
        return true;
    }
    if (a.kind() != b.kind()) {
        return false;
    }
    using K = SetFormula::Kind;
    switch (a.kind()) {
    case K::member:
    case K::equal:
        return a.left_var() == b.left_var() && a.right_var() == b.right_var();
    case K::bottom:
        return true;
    case K::exists:
    case K::forall:
        return a.var() == b.var() && a.body() == b.body();
    default:
        return a.lhs() == b.lhs() && a.rhs() == b.rhs();
    }
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

enum class Tok { ident, tilde, amp, bar, arrow, iff, lparen, rparen, dot, eq, in, forall, exists, bot, end };

struct Token {
    Tok kind;
    std::string text;
    std::size_t pos;
};

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\''; }

std::vector<Token> tokenize(std::string_view text)
{
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < text.size()) {
        const char c = text[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
            continue;
        }
        const auto rest = text.substr(i);
        if (rest.starts_with("_|_")) {
            out.push_back({Tok::bot, "_|_", i});
            i += 3;
        } else if (rest.starts_with("<->")) {
            out.push_back({Tok::iff, "<->", i});
            i += 3;
        } else if (rest.starts_with("->")) {
            out.push_back({Tok::arrow, "->", i});
            i += 2;
        } else if (c == '~' || c == '!') {
            out.push_back({Tok::tilde, "~", i++});
        } else if (c == '&') {
            out.push_back({Tok::amp, "&", i++});
        } else if (c == '|') {
            out.push_back({Tok::bar, "|", i++});
        } else if (c == '(') {
            out.push_back({Tok::lparen, "(", i++});
        } else if (c == ')') {
            out.push_back({Tok::rparen, ")", i++});
        } else if (c == '.') {
            out.push_back({Tok::dot, ".", i++});
        } else if (c == '=') {
            out.push_back({Tok::eq, "=", i++});
        } else if (ident_start(c)) {
            std::size_t j = i + 1;
            while (j < text.size() && ident_char(text[j])) {
                ++j;
            }
            std::string word(text.substr(i, j - i));
            Tok kind = Tok::ident;
            if (word == "in") {
                kind = Tok::in;
            } else if (word == "forall") {
                kind = Tok::forall;
            } else if (word == "exists") {
                kind = Tok::exists;
            } else if (word == "bot") {
                kind = Tok::bot;
            }
            out.push_back({kind, std::move(word), i});
            i = j;
        } else {
            throw ParseError(std::string("unexpected character '") + c + "'", i);
        }
    }
    out.push_back({Tok::end, "", text.size()});
    return out;
}

template <typename F>
class Parser {
public:
    explicit Parser(std::string_view text) : tokens_(tokenize(text)) {}

    F parse()
    {
        F result = parse_iff();
        if (peek().kind != Tok::end) {
            fail("unexpected '" + peek().text + "'");
        }
        return result;
    }

private:
    static constexpr bool set_mode = std::is_same_v<F, SetFormula>;

    const Token& peek() const { return tokens_[pos_]; }
    const Token& next() { return tokens_[pos_++]; }

    bool accept(Tok kind)
    {
        if (peek().kind == kind) {
            ++pos_;
            return true;
        }
        return false;
    }

    [[noreturn]] void fail(const std::string& message) const { throw ParseError(message, peek().pos); }

    const Token& expect(Tok kind, const char* what)
    {
        if (peek().kind != kind) {
            fail(std::string("expected ") + what);
        }
        return next();
    }

    F parse_iff()
    {
        F lhs = parse_imp();
        if (accept(Tok::iff)) {
            F rhs = parse_iff();
            return F::conj(F::imp(lhs, rhs), F::imp(rhs, lhs));
        }
        return lhs;
    }

    F parse_imp()
    {
        F lhs = parse_or();
        if (accept(Tok::arrow)) {
            return F::imp(std::move(lhs), parse_imp());
        }
        return lhs;
    }

    F parse_or()
    {
        F lhs = parse_and();
        if (accept(Tok::bar)) {
            return F::disj(std::move(lhs), parse_or());
        }
        return lhs;
    }

    F parse_and()
    {
        F lhs = parse_unary();
        if (accept(Tok::amp)) {
            return F::conj(std::move(lhs), parse_and());
        }
        return lhs;
    }

    F parse_unary()
    {
        if (accept(Tok::tilde)) {
            return F::neg(parse_unary());
        }
        if constexpr (set_mode) {
            if (peek().kind == Tok::forall || peek().kind == Tok::exists) {
                const bool universal = next().kind == Tok::forall;
                std::string var = expect(Tok::ident, "variable").text;
                std::string bound;
                if (accept(Tok::in)) {
                    bound = expect(Tok::ident, "variable").text;
                }
                expect(Tok::dot, "'.'");
                F body = parse_iff();
                if (bound.empty()) {
                    return universal ? F::forall(std::move(var), std::move(body))
                                     : F::exists(std::move(var), std::move(body));
                }
                return universal ? F::forall_in(std::move(var), bound, std::move(body))
                                 : F::exists_in(std::move(var), bound, std::move(body));
            }
        }
        return parse_atom();
    }

    F parse_atom()
    {
        if (accept(Tok::lparen)) {
            F inner = parse_iff();
            expect(Tok::rparen, "')'");
            return inner;
        }
        if (accept(Tok::bot)) {
            return F::bottom();
        }
        if (peek().kind != Tok::ident) {
            fail(peek().kind == Tok::end ? "unexpected end of input" : "unexpected '" + peek().text + "'");
        }
        std::string name = next().text;
        if constexpr (set_mode) {
            if (accept(Tok::in)) {
                return F::member(std::move(name), expect(Tok::ident, "variable").text);
            }
            if (accept(Tok::eq)) {
                return F::equal(std::move(name), expect(Tok::ident, "variable").text);
            }
            fail("expected 'in' or '=' after variable");
        } else {
            return F::letter(std::move(name));
        }
    }

    std::vector<Token> tokens_;
    std::size_t pos_ = 0;
};

} // namespace

PropFormula parse_prop(std::string_view text) { return Parser<PropFormula>(text).parse(); }
SetFormula parse_set(std::string_view text) { return Parser<SetFormula>(text).parse(); }

// ---------------------------------------------------------------------------
// Printing

namespace {

constexpr int prec_imp = 1;
constexpr int prec_disj = 2;
constexpr int prec_conj = 3;
constexpr int prec_unary = 4;

int binary_prec(PropFormula::Kind k)
{
    return k == PropFormula::Kind::imp ? prec_imp : k == PropFormula::Kind::disj ? prec_disj : prec_conj;
}

int binary_prec(SetFormula::Kind k)
{
    return k == SetFormula::Kind::imp ? prec_imp : k == SetFormula::Kind::disj ? prec_disj : prec_conj;
}

const char* binary_op(int prec)
{
    return prec == prec_imp ? " -> " : prec == prec_disj ? " | " : " & ";
}

void print_prop(const PropFormula& f, int ctx, std::string& out)
{
    using K = PropFormula::Kind;
    switch (f.kind()) {
    case K::letter:
        out += f.name();
        return;
    case K::bottom:
        out += "bot";
        return;
    default:
        break;
    }
    if (f.is_negation()) {
        out += '~';
        print_prop(f.lhs(), prec_unary, out);
        return;
    }
    const int p = binary_prec(f.kind());
    const bool parens = p < ctx;
    if (parens) {
        out += '(';
    }
    print_prop(f.lhs(), p + 1, out);
    out += binary_op(p);
    print_prop(f.rhs(), p, out);
    if (parens) {
        out += ')';
    }
}

class SetPrinter {
public:
    explicit SetPrinter(bool canonical) : canonical_(canonical) {}

    void print(const SetFormula& f, int ctx, bool rightmost, std::string& out)
    {
        using K = SetFormula::Kind;
        switch (f.kind()) {
        case K::member:
            out += name(f.left_var()) + " in " + name(f.right_var());
            return;
        case K::equal:
            out += name(f.left_var()) + " = " + name(f.right_var());
            return;
        case K::bottom:
            out += "bot";
            return;
        case K::exists:
        case K::forall:
            print_quantifier(f, rightmost, out);
            return;
        default:
            break;
        }
        if (f.is_negation()) {
            out += '~';
            print(f.lhs(), prec_unary, rightmost, out);
            return;
        }
        const int p = binary_prec(f.kind());
        const bool parens = p < ctx;
        if (parens) {
            out += '(';
        }
        print(f.lhs(), p + 1, false, out);
        out += binary_op(p);
        print(f.rhs(), p, parens || rightmost, out);
        if (parens) {
            out += ')';
        }
    }

private:
    std::string name(const std::string& var) const
    {
        if (canonical_) {
            for (auto it = scope_.rbegin(); it != scope_.rend(); ++it) {
                if (it->first == var) {
                    return it->second;
                }
            }
        }
        return var;
    }

    void print_quantifier(const SetFormula& f, bool rightmost, std::string& out)
    {
        const bool universal = f.kind() == SetFormula::Kind::forall;
        const SetFormula body = f.body();
        // Re-sugar bounded quantifiers: forall x (x in a -> B), exists x (x in a & B).
        const auto guard_kind = universal ? SetFormula::Kind::imp : SetFormula::Kind::conj;
        std::string bound;
        SetFormula inner = body;
        if (body.kind() == guard_kind) {
            const SetFormula guard = body.lhs();
            if (guard.kind() == SetFormula::Kind::member && guard.left_var() == f.var()
                && guard.right_var() != f.var()) {
                bound = name(guard.right_var());
                inner = body.rhs();
            }
        }
        if (!rightmost) {
            out += '(';
        }
        out += universal ? "forall " : "exists ";
        scope_.emplace_back(f.var(), "_" + std::to_string(scope_.size()));
        out += name(f.var());
        if (!bound.empty()) {
            out += " in " + bound;
        }
        out += " . ";
        print(inner, 0, true, out);
        scope_.pop_back();
        if (!rightmost) {
            out += ')';
        }
    }

    bool canonical_;
    std::vector<std::pair<std::string, std::string>> scope_;
};

} // namespace

std::string to_string(const PropFormula& formula)
{
    std::string out;
    print_prop(formula, 0, out);
    return out;
}

std::string to_string(const SetFormula& formula)
{
    std::string out;
    SetPrinter(false).print(formula, 0, true, out);
    return out;
}

std::string canonical_string(const SetFormula& formula)
{
    std::string out;
    SetPrinter(true).print(formula, 0, true, out);
    return out;
}

bool alpha_equivalent(const SetFormula& a, const SetFormula& b)
{
    return canonical_string(a) == canonical_string(b);
}

// ---------------------------------------------------------------------------
// Syntactic queries

std::set<std::string> letters(const PropFormula& formula)
{
    std::set<std::string> out;
    std::function<void(const PropFormula&)> walk = [&](const PropFormula& f) {
        switch (f.kind()) {
        case PropFormula::Kind::letter:
            out.insert(f.name());
            break;
        case PropFormula::Kind::bottom:
            break;
        default:
            walk(f.lhs());
            walk(f.rhs());
        }
    };
    walk(formula);
    return out;
}

int depth(const PropFormula& formula)
{
    if (formula.kind() == PropFormula::Kind::letter || formula.kind() == PropFormula::Kind::bottom) {
        return 0;
    }
    if (formula.is_negation()) {
        return 1 + depth(formula.lhs());
    }
    return 1 + std::max(depth(formula.lhs()), depth(formula.rhs()));
}

namespace {

// Memoized by node identity: shared subformulas are visited once.
const std::set<std::string>& collect_free(const SetFormula& f,
                                          std::unordered_map<const void*, std::set<std::string>>& memo)
{
    if (auto it = memo.find(f.identity()); it != memo.end()) {
        return it->second;
    }
    std::set<std::string> out;
    using K = SetFormula::Kind;
    switch (f.kind()) {
    case K::member:
    case K::equal:
        out = {f.left_var(), f.right_var()};
        break;
    case K::bottom:
        break;
    case K::exists:
    case K::forall:
        out = collect_free(f.body(), memo);
        out.erase(f.var());
        break;
    default:
        out = collect_free(f.lhs(), memo);
        const auto& rhs = collect_free(f.rhs(), memo);
        out.insert(rhs.begin(), rhs.end());
    }
    return memo.emplace(f.identity(), std::move(out)).first->second;
}

} // namespace

std::set<std::string> free_variables(const SetFormula& formula)
{
    std::unordered_map<const void*, std::set<std::string>> memo;
    return collect_free(formula, memo);
}

std::set<std::string> bound_variables(const SetFormula& formula)
{
    std::set<std::string> out;
    std::set<const void*> seen;
    std::function<void(const SetFormula&)> walk = [&](const SetFormula& f) {
        if (!seen.insert(f.identity()).second) {
            return;
        }
        using K = SetFormula::Kind;
        switch (f.kind()) {
        case K::member:
        case K::equal:
        case K::bottom:
            break;
        case K::exists:
        case K::forall:
            out.insert(f.var());
            walk(f.body());
            break;
        default:
            walk(f.lhs());
            walk(f.rhs());
        }
    };
    walk(formula);
    return out;
}

bool is_sentence(const SetFormula& formula) { return free_variables(formula).empty(); }

int quantifier_depth(const SetFormula& formula)
{
    using K = SetFormula::Kind;
    switch (formula.kind()) {
    case K::member:
    case K::equal:
    case K::bottom:
        return 0;
    case K::exists:
    case K::forall:
        return 1 + quantifier_depth(formula.body());
    default:
        return std::max(quantifier_depth(formula.lhs()), quantifier_depth(formula.rhs()));
    }
}

// ---------------------------------------------------------------------------
// Substitution

Substitution::Substitution(std::map<std::string, SetFormula> images)
{
    for (auto& [letter, sentence] : images) {
        set(letter, std::move(sentence));
    }
}

void Substitution::set(const std::string& letter, SetFormula sentence)
{
    if (!is_sentence(sentence)) {
        throw PreconditionError("substitution image for '" + letter + "' has free variables: " + to_string(sentence));
    }
    images_.insert_or_assign(letter, std::move(sentence));
}

const SetFormula& Substitution::at(const std::string& letter) const
{
    auto it = images_.find(letter);
    if (it == images_.end()) {
        throw UnboundError("substitution does not define letter '" + letter + "'");
    }
    return it->second;
}

SetFormula apply_substitution(const PropFormula& formula, const Substitution& sigma)
{
    std::unordered_map<const void*, SetFormula> memo;
    std::function<SetFormula(const PropFormula&)> go = [&](const PropFormula& f) -> SetFormula {
        if (auto it = memo.find(f.identity()); it != memo.end()) {
            return it->second;
        }
        SetFormula out = SetFormula::bottom();
        switch (f.kind()) {
        case PropFormula::Kind::letter:
            out = sigma.at(f.name());
            break;
        case PropFormula::Kind::bottom:
            break;
        case PropFormula::Kind::conj:
            out = SetFormula::conj(go(f.lhs()), go(f.rhs()));
            break;
        case PropFormula::Kind::disj:
            out = SetFormula::disj(go(f.lhs()), go(f.rhs()));
            break;
        case PropFormula::Kind::imp:
            out = SetFormula::imp(go(f.lhs()), go(f.rhs()));
            break;
        }
        memo.emplace(f.identity(), out);
        return out;
    };
    return go(formula);
}

// ---------------------------------------------------------------------------
// Ordinal height sentences

SetFormula ordinal_formula(int n, const std::string& var)
{
    if (n < 0) {
        throw PreconditionError("ordinal_formula: n must be non-negative");
    }
    using S = SetFormula;
    const std::string t = var + "_t";
    const std::string s = var + "_s";
    const std::string z = var + "_z";

    S transitive = S::forall_in(t, var, S::forall_in(s, t, S::member(s, var)));
    S linear = S::forall_in(t, var,
                            S::forall_in(s, var, S::disj(S::member(t, s), S::disj(S::equal(t, s), S::member(s, t)))));

    std::vector<std::string> ys;
    for (int i = 1; i <= n; ++i) {
        ys.push_back(var + "_" + std::to_string(i));
    }
    std::vector<S> covers;
    for (const auto& y : ys) {
        covers.push_back(S::equal(z, y));
    }
    std::vector<S> parts;
    for (std::size_t i = 0; i < ys.size(); ++i) {
        for (std::size_t j = i + 1; j < ys.size(); ++j) {
            parts.push_back(S::neg(S::equal(ys[i], ys[j])));
        }
    }
    parts.push_back(S::forall_in(z, var, S::disj_any(covers)));
    S cardinality = S::conj_all(parts);
    for (auto it = ys.rbegin(); it != ys.rend(); ++it) {
        cardinality = S::exists_in(*it, var, std::move(cardinality));
    }
    return S::conj(std::move(transitive), S::conj(std::move(linear), std::move(cardinality)));
}

SetFormula ordinal_sentence(int n)
{
    using S = SetFormula;
    return S::conj(S::exists("x", ordinal_formula(n, "x")), S::neg(S::exists("x", ordinal_formula(n + 1, "x"))));
}

// ---------------------------------------------------------------------------

std::vector<PropFormula> formula_family(const std::vector<std::string>& names, int max_depth)
{
    std::vector<PropFormula> all;
    for (const auto& n : names) {
        all.push_back(PropFormula::letter(n));
    }
    std::size_t previous_end = 0; // formulas of depth < d-1 occupy [0, previous_end)
    for (int d = 1; d <= max_depth; ++d) {
        const std::size_t level_begin = previous_end;
        const std::size_t level_end = all.size();
        for (std::size_t i = level_begin; i < level_end; ++i) {
            all.push_back(PropFormula::neg(all[i]));
        }
        for (auto kind : {PropFormula::Kind::conj, PropFormula::Kind::disj, PropFormula::Kind::imp}) {
            for (std::size_t i = 0; i < level_end; ++i) {
                for (std::size_t j = 0; j < level_end; ++j) {
                    if (i < level_begin && j < level_begin) {
                        continue;
                    }
                    all.push_back(PropFormula::binary(kind, all[i], all[j]));
                }
            }
        }
        previous_end = level_end;
    }
    return all;
}

} // namespace kripke

namespace kripke {

namespace {

std::vector<SetFormula> quantifier_free(const std::vector<std::string>& vars)
{
    using S = SetFormula;
    std::vector<S> atoms{S::bottom()};
    for (const auto& a : vars) {
        for (const auto& b : vars) {
            atoms.push_back(S::member(a, b));
        }
    }
    for (std::size_t i = 0; i < vars.size(); ++i) {
        for (std::size_t j = i; j < vars.size(); ++j) {
            atoms.push_back(S::equal(vars[i], vars[j]));
        }
    }
    std::vector<S> out = atoms;
    for (std::size_t i = 1; i < atoms.size(); ++i) {
        out.push_back(S::neg(atoms[i]));
    }
    for (auto kind : {S::Kind::conj, S::Kind::disj, S::Kind::imp}) {
        for (std::size_t i = 1; i < atoms.size(); ++i) {
            for (std::size_t j = 1; j < atoms.size(); ++j) {
                if (i != j) {
                    out.push_back(S::binary(kind, atoms[i], atoms[j]));
                }
            }
        }
    }
    return out;
}

SetFormula quantify(bool universal, const std::string& var, SetFormula body)
{
    return universal ? SetFormula::forall(var, std::move(body)) : SetFormula::exists(var, std::move(body));
}

} // namespace

std::vector<SetFormula> sentence_family(int max_quantifier_depth)
{
    using S = SetFormula;
    if (max_quantifier_depth < 0 || max_quantifier_depth > 2) {
        throw PreconditionError("sentence_family supports quantifier depth 0..2");
    }
    std::vector<S> out{S::bottom(), S::top()};
    if (max_quantifier_depth == 0) {
        return out;
    }
    const auto one = quantifier_free({"x"});
    for (bool u : {true, false}) {
        for (const auto& m : one) {
            out.push_back(quantify(u, "x", m));
        }
    }
    if (max_quantifier_depth == 1) {
        return out;
    }
    const auto two = quantifier_free({"x", "y"});
    for (bool u : {true, false}) {
        for (bool v : {true, false}) {
            for (const auto& m : two) {
                out.push_back(quantify(u, "x", quantify(v, "y", m)));
            }
        }
    }
    // Q x (A(x) op Q y B(x, y))
    const std::vector<S> guards{S::member("x", "x"), S::neg(S::member("x", "x")), S::equal("x", "x")};
    const std::vector<S> inner{S::member("y", "x"), S::member("x", "y"), S::equal("x", "y")};
    for (bool u : {true, false}) {
        for (bool v : {true, false}) {
            for (auto kind : {S::Kind::conj, S::Kind::disj, S::Kind::imp}) {
                for (const auto& g : guards) {
                    for (const auto& b : inner) {
                        out.push_back(quantify(u, "x", S::binary(kind, g, quantify(v, "y", b))));
                    }
                }
            }
        }
    }
    return out;
}

namespace {

struct RandomFormulas {
    std::mt19937_64& rng;
    int size_left;

    int pick(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng); }

    SetFormula atom(const std::vector<std::string>& vars)
    {
        if (vars.empty() || pick(8) == 0) {
            return SetFormula::bottom();
        }
        const auto& a = vars[static_cast<std::size_t>(pick(static_cast<int>(vars.size())))];
        const auto& b = vars[static_cast<std::size_t>(pick(static_cast<int>(vars.size())))];
        return pick(3) == 0 ? SetFormula::equal(a, b) : SetFormula::member(a, b);
    }

    SetFormula gen(int qd, std::vector<std::string>& vars)
    {
        --size_left;
        const bool connective = size_left > 0 && pick(qd > 0 ? 3 : 2) == 0;
        if (connective) {
            if (pick(4) == 0) {
                return SetFormula::neg(gen(qd, vars));
            }
            const auto kind = std::array{SetFormula::Kind::conj, SetFormula::Kind::disj, SetFormula::Kind::imp}[static_cast<std::size_t>(pick(3))];
            const int other = pick(qd + 1);
            SetFormula l = gen(qd, vars);
            SetFormula r = gen(other, vars);
            return pick(2) == 0 ? SetFormula::binary(kind, l, r) : SetFormula::binary(kind, r, l);
        }
        if (qd > 0) {
            const std::string name = "v" + std::to_string(vars.size());
            vars.push_back(name);
            SetFormula body = gen(qd - 1, vars);
            vars.pop_back();
            return quantify(pick(2) == 0, name, body);
        }
        return atom(vars);
    }
};

} // namespace

SetFormula random_set_formula(std::mt19937_64& rng, int quantifier_depth, const std::vector<std::string>& free,
                              int max_size)
{
    RandomFormulas g{rng, max_size};
    std::vector<std::string> vars = free;
    return g.gen(quantifier_depth, vars);
}

} // namespace kripke
