#include "g3eq/document.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <optional>

namespace g3eq {

ParseError::ParseError(std::size_t line, std::size_t column, const std::string &message)
    : Error(std::to_string(line) + ":" + std::to_string(column) + ": " + message), line_(line), column_(column) {}

namespace {

struct SExpr {
    bool atom = false;
    std::string text;
    std::vector<SExpr> items;
    std::size_t line = 1;
    std::size_t column = 1;

    bool is(std::string_view word) const { return atom && text == word; }
};

class Reader {
public:
    explicit Reader(std::string_view text) : text_(text) {}

    std::vector<SExpr> read_all() {
        std::vector<SExpr> out;
        skip();
        while (pos_ < text_.size()) {
            out.push_back(read());
            skip();
        }
        return out;
    }

private:
    std::string_view text_;
    std::size_t pos_ = 0;
    std::size_t line_ = 1;
    std::size_t column_ = 1;

    void advance() {
        if (text_[pos_] == '\n') {
            ++line_;
            column_ = 1;
        } else {
            ++column_;
        }
        ++pos_;
    }

    void skip() {
        while (pos_ < text_.size()) {
            const char c = text_[pos_];
            if (c == ';') {
                while (pos_ < text_.size() && text_[pos_] != '\n') advance();
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                advance();
            } else {
                break;
            }
        }
    }

    SExpr read() {
        SExpr e;
        e.line = line_;
        e.column = column_;
        if (text_[pos_] == ')') throw ParseError(line_, column_, "unexpected ')'");
        if (text_[pos_] == '(') {
            advance();
            skip();
            while (true) {
                if (pos_ >= text_.size()) throw ParseError(e.line, e.column, "unbalanced '(': missing ')'");
                if (text_[pos_] == ')') {
                    advance();
                    return e;
                }
                e.items.push_back(read());
                skip();
            }
        }
        e.atom = true;
        while (pos_ < text_.size()) {
            const char c = text_[pos_];
            if (c == '(' || c == ')' || c == ';' || std::isspace(static_cast<unsigned char>(c))) break;
            e.text += c;
            advance();
        }
        return e;
    }
};

[[noreturn]] void fail(const SExpr &at, const std::string &message) { throw ParseError(at.line, at.column, message); }

const std::vector<std::string_view> kReserved{"=",   "bot", "and",  "or",    "imp",  "all",        "ex",
                                              "seq", "axiom", "rule", "goal", "config", "signature", "derivation"};

bool reserved_word(std::string_view w) { return std::find(kReserved.begin(), kReserved.end(), w) != kReserved.end(); }

bool valid_identifier(std::string_view w) {
    if (w.empty() || w.front() == ':' || std::isdigit(static_cast<unsigned char>(w.front()))) return false;
    return w.find('=') == std::string_view::npos;
}

std::size_t number(const SExpr &e) {
    if (!e.atom) fail(e, "expected a number");
    std::size_t value = 0;
    auto [ptr, ec] = std::from_chars(e.text.data(), e.text.data() + e.text.size(), value);
    if (ec != std::errc() || ptr != e.text.data() + e.text.size()) fail(e, "expected a number, got '" + e.text + "'");
    return value;
}

class Interpreter {
public:
    explicit Interpreter(const Signature &sig) : sig_(sig) {}

    std::string variable_name(const SExpr &e) const {
        if (!e.atom || !valid_identifier(e.text) || reserved_word(e.text)) fail(e, "expected a variable name");
        if (sig_.declares(e.text)) fail(e, "'" + e.text + "' is a declared symbol, not a variable");
        return e.text;
    }

    Term term(const SExpr &e) const {
        if (e.atom) {
            if (sig_.constants.count(e.text)) return Term::constant(e.text);
            if (sig_.functions.count(e.text)) fail(e, "function symbol '" + e.text + "' used without arguments");
            if (sig_.predicates.count(e.text)) fail(e, "predicate '" + e.text + "' used as a term");
            return Term::variable(variable_name(e));
        }
        if (e.items.empty() || !e.items[0].atom) fail(e, "expected a term");
        const std::string &f = e.items[0].text;
        auto it = sig_.functions.find(f);
        if (it == sig_.functions.end()) fail(e.items[0], "undeclared function symbol '" + f + "'");
        if (it->second != e.items.size() - 1) {
            fail(e, "function '" + f + "' expects " + std::to_string(it->second) + " arguments, got " +
                        std::to_string(e.items.size() - 1));
        }
        std::vector<Term> args;
        for (std::size_t i = 1; i < e.items.size(); ++i) args.push_back(term(e.items[i]));
        return Term::apply(f, std::move(args));
    }

    Formula formula(const SExpr &e) const {
        if (e.is("bot")) return Formula::bottom();
        if (e.atom) fail(e, "expected a formula, got '" + e.text + "'");
        if (e.items.empty() || !e.items[0].atom) fail(e, "expected a formula");
        const std::string &head = e.items[0].text;
        auto arity = [&](std::size_t n) {
            if (e.items.size() != n + 1) fail(e, "'" + head + "' expects " + std::to_string(n) + " arguments");
        };
        if (head == "=") {
            arity(2);
            return Formula::equal(term(e.items[1]), term(e.items[2]));
        }
        if (head == "and" || head == "or" || head == "imp") {
            arity(2);
            Formula a = formula(e.items[1]);
            Formula b = formula(e.items[2]);
            if (head == "and") return Formula::conj(a, b);
            if (head == "or") return Formula::disj(a, b);
            return Formula::implies(a, b);
        }
        if (head == "all" || head == "ex") {
            arity(2);
            std::string x = variable_name(e.items[1]);
            Formula body = formula(e.items[2]);
            return head == "all" ? Formula::forall(x, body) : Formula::exists(x, body);
        }
        auto it = sig_.predicates.find(head);
        if (it == sig_.predicates.end()) fail(e.items[0], "undeclared predicate '" + head + "'");
        if (it->second != e.items.size() - 1) {
            fail(e, "predicate '" + head + "' expects " + std::to_string(it->second) + " arguments, got " +
                        std::to_string(e.items.size() - 1));
        }
        std::vector<Term> args;
        for (std::size_t i = 1; i < e.items.size(); ++i) args.push_back(term(e.items[i]));
        return Formula::atom(head, std::move(args));
    }

    std::vector<Formula> formula_list(const SExpr &e) const {
        if (e.atom) fail(e, "expected a parenthesized formula list");
        std::vector<Formula> out;
        for (const auto &item : e.items) out.push_back(formula(item));
        return out;
    }

    Sequent sequent(const SExpr &e) const {
        if (e.atom || e.items.size() != 3 || !e.items[0].is("seq")) fail(e, "expected (seq (formulas) (formulas))");
        return Sequent{formula_list(e.items[1]), formula_list(e.items[2])};
    }

    Derivation node(const SExpr &e) const {
        if (e.atom || e.items.empty()) fail(e, "expected (axiom ...) or (rule ...)");
        if (e.items[0].is("axiom")) {
            if (e.items.size() != 2) fail(e, "axiom takes exactly one sequent");
            return Derivation::axiom(sequent(e.items[1]));
        }
        if (!e.items[0].is("rule")) fail(e.items[0], "expected 'axiom' or 'rule'");
        if (e.items.size() < 3 || !e.items[1].atom) fail(e, "rule needs a tag and a sequent");
        auto tag = parse_tag(e.items[1].text);
        if (!tag || *tag == RuleTag::Axiom) fail(e.items[1], "unknown rule tag '" + e.items[1].text + "'");
        Derivation d;
        d.rule.tag = *tag;
        std::size_t i = 2;
        std::vector<std::string> seen;
        while (i < e.items.size() && e.items[i].atom && !e.items[i].text.empty() && e.items[i].text[0] == ':') {
            const SExpr &key = e.items[i];
            if (i + 1 >= e.items.size()) fail(key, "parameter " + key.text + " has no value");
            if (std::find(seen.begin(), seen.end(), key.text) != seen.end()) fail(key, "duplicate " + key.text);
            seen.push_back(key.text);
            const SExpr &value = e.items[i + 1];
            parameter(d.rule, key, value);
            i += 2;
        }
        require_parameters(d.rule, seen, e);
        if (i >= e.items.size()) fail(e, "rule is missing its conclusion sequent");
        d.conclusion = sequent(e.items[i]);
        for (++i; i < e.items.size(); ++i) d.premises.push_back(node(e.items[i]));
        return d;
    }

private:
    const Signature &sig_;

    static bool wants(RuleTag tag, std::string_view key) {
        if (key == ":principal") return principal_in_antecedent(tag) || principal_in_succedent(tag);
        if (key == ":witness") return uses_witness(tag);
        if (key == ":eigen") return uses_eigenvariable(tag);
        if (key == ":term") return tag == RuleTag::Ref;
        if (key == ":eq" || key == ":target" || key == ":pos") return is_replacement(tag);
        return false;
    }

    void parameter(RuleInstance &rule, const SExpr &key, const SExpr &value) const {
        if (!wants(rule.tag, key.text)) {
            fail(key, "parameter " + key.text + " is not used by rule " + std::string(tag_name(rule.tag)));
        }
        if (key.text == ":principal") {
            rule.principal = number(value);
        } else if (key.text == ":witness" || key.text == ":term") {
            rule.term = term(value);
        } else if (key.text == ":eigen") {
            rule.eigenvariable = variable_name(value);
        } else if (key.text == ":eq") {
            rule.eq_index = number(value);
        } else if (key.text == ":target") {
            rule.target_index = number(value);
        } else {
            if (value.atom) fail(value, ":pos expects a list of positions such as ((0) (1 0))");
            for (const auto &p : value.items) {
                if (p.atom) fail(p, "a position is a parenthesized list of indices");
                Position pos;
                for (const auto &k : p.items) pos.path.push_back(number(k));
                rule.positions.push_back(std::move(pos));
            }
        }
    }

    static void require_parameters(const RuleInstance &rule, const std::vector<std::string> &seen, const SExpr &at) {
        auto need = [&](std::string_view key) {
            if (wants(rule.tag, key) && std::find(seen.begin(), seen.end(), key) == seen.end()) {
                fail(at, "rule " + std::string(tag_name(rule.tag)) + " needs parameter " + std::string(key));
            }
        };
        for (std::string_view key : {":principal", ":witness", ":eigen", ":term", ":eq", ":target", ":pos"}) {
            need(key);
        }
    }
};

std::string declared_name(const SExpr &e) {
    if (!e.atom || !valid_identifier(e.text) || reserved_word(e.text)) fail(e, "invalid symbol name");
    return e.text;
}

Signature read_signature(const SExpr &e) {
    if (e.atom || e.items.empty() || !e.items[0].is("signature")) fail(e, "document must start with (signature ...)");
    Signature sig;
    for (std::size_t i = 1; i < e.items.size(); ++i) {
        const SExpr &decl = e.items[i];
        if (decl.atom || decl.items.empty()) fail(decl, "expected (fun ..), (pred ..) or (const ..)");
        const SExpr &kind = decl.items[0];
        std::string name;
        if (kind.is("fun") || kind.is("pred")) {
            if (decl.items.size() != 3) fail(decl, "expected (" + kind.text + " name arity)");
            name = declared_name(decl.items[1]);
            if (sig.declares(name)) fail(decl.items[1], "symbol '" + name + "' declared twice");
            const std::size_t arity = number(decl.items[2]);
            if (kind.is("fun")) {
                if (arity == 0) fail(decl.items[2], "function arity must be at least 1; declare constants instead");
                sig.functions[name] = arity;
            } else {
                sig.predicates[name] = arity;
            }
        } else if (kind.is("const")) {
            if (decl.items.size() != 2) fail(decl, "expected (const name)");
            name = declared_name(decl.items[1]);
            if (sig.declares(name)) fail(decl.items[1], "symbol '" + name + "' declared twice");
            sig.constants.insert(name);
        } else {
            fail(kind, "unknown declaration kind");
        }
    }
    return sig;
}

CalculusConfig read_config(const SExpr &e) {
    if (e.atom || e.items.empty() || !e.items[0].is("config")) fail(e, "expected (config logic=.. eq=..)");
    CalculusConfig config;
    bool have_logic = false;
    bool have_eq = false;
    for (std::size_t i = 1; i < e.items.size(); ++i) {
        const SExpr &kv = e.items[i];
        if (!kv.atom) fail(kv, "expected key=value");
        const auto eq = kv.text.find('=');
        if (eq == std::string::npos) fail(kv, "expected key=value");
        const std::string key = kv.text.substr(0, eq);
        const std::string value = kv.text.substr(eq + 1);
        if (key == "logic") {
            auto l = parse_logic(value);
            if (!l) fail(kv, "unknown logic '" + value + "' (expected m, i or c)");
            config.logic = *l;
            have_logic = true;
        } else if (key == "eq") {
            auto m = parse_equality_mode(value);
            if (!m) fail(kv, "unknown equality mode '" + value + "'");
            config.equality = *m;
            have_eq = true;
        } else {
            fail(kv, "unknown config key '" + key + "'");
        }
    }
    if (!have_logic || !have_eq) fail(e, "config needs both logic= and eq=");
    return config;
}

std::string item_name(const SExpr &e) {
    if (!e.atom || e.text.empty() || e.text.front() == '(') fail(e, "expected a name");
    return e.text;
}

SExpr single(std::string_view text) {
    auto all = Reader(text).read_all();
    if (all.size() != 1) throw ParseError(1, 1, "expected exactly one expression");
    return std::move(all[0]);
}

std::string list_of(const std::vector<Formula> &fs) {
    std::string out = "(";
    for (std::size_t i = 0; i < fs.size(); ++i) {
        if (i) out += ' ';
        out += fs[i].str();
    }
    return out + ")";
}

std::string sequent_text(const Sequent &s) {
    return "(seq " + list_of(s.antecedent) + " " + list_of(s.succedent) + ")";
}

void print_node(const Derivation &d, std::size_t indent, std::string &out) {
    out.append(indent, ' ');
    if (d.rule.tag == RuleTag::Axiom) {
        out += "(axiom " + sequent_text(d.conclusion) + ")";
        return;
    }
    const RuleInstance &r = d.rule;
    out += "(rule ";
    out += tag_name(r.tag);
    if (principal_in_antecedent(r.tag) || principal_in_succedent(r.tag)) out += " :principal " + std::to_string(r.principal);
    if (uses_witness(r.tag)) out += " :witness " + (r.term ? r.term->str() : std::string("?"));
    if (uses_eigenvariable(r.tag)) out += " :eigen " + r.eigenvariable;
    if (r.tag == RuleTag::Ref) out += " :term " + (r.term ? r.term->str() : std::string("?"));
    if (is_replacement(r.tag)) {
        out += " :eq " + std::to_string(r.eq_index) + " :target " + std::to_string(r.target_index) + " :pos (";
        for (std::size_t i = 0; i < r.positions.size(); ++i) {
            if (i) out += ' ';
            out += r.positions[i].str();
        }
        out += ")";
    }
    out += " " + sequent_text(d.conclusion);
    for (const auto &p : d.premises) {
        out += "\n";
        print_node(p, indent + 2, out);
    }
    out += ")";
}

bool lists_identical(const std::vector<Formula> &a, const std::vector<Formula> &b) {
    return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin());
}

}  // namespace

ProofDocument parse_document(std::string_view text) {
    auto items = Reader(text).read_all();
    if (items.empty()) throw ParseError(1, 1, "empty document: expected (signature ...)");
    ProofDocument doc;
    doc.signature = read_signature(items[0]);
    if (items.size() < 2) fail(items[0], "missing (config ...) after the signature");
    doc.config = read_config(items[1]);
    Interpreter in(doc.signature);
    for (std::size_t i = 2; i < items.size(); ++i) {
        const SExpr &e = items[i];
        if (e.atom || e.items.empty()) fail(e, "expected (derivation ..) or (goal ..)");
        if (e.items[0].is("derivation")) {
            if (e.items.size() != 3) fail(e, "expected (derivation name node)");
            doc.derivations.push_back({item_name(e.items[1]), in.node(e.items[2])});
        } else if (e.items[0].is("goal")) {
            if (e.items.size() != 3) fail(e, "expected (goal name sequent)");
            doc.goals.push_back({item_name(e.items[1]), in.sequent(e.items[2])});
        } else {
            fail(e.items[0], "expected 'derivation' or 'goal'");
        }
    }
    return doc;
}

std::string print_derivation(const Derivation &d, std::size_t indent) {
    std::string out;
    print_node(d, indent, out);
    return out;
}

std::string print_document(const ProofDocument &doc) {
    std::string out = "(signature";
    for (const auto &[f, n] : doc.signature.functions) out += " (fun " + f + " " + std::to_string(n) + ")";
    for (const auto &[p, n] : doc.signature.predicates) out += " (pred " + p + " " + std::to_string(n) + ")";
    for (const auto &c : doc.signature.constants) out += " (const " + c + ")";
    out += ")\n(config logic=";
    out += logic_name(doc.config.logic);
    out += " eq=";
    out += equality_mode_name(doc.config.equality);
    out += ")\n";
    for (const auto &nd : doc.derivations) {
        out += "\n(derivation " + nd.name + "\n";
        print_node(nd.derivation, 2, out);
        out += ")\n";
    }
    for (const auto &g : doc.goals) out += "\n(goal " + g.name + " " + sequent_text(g.sequent) + ")\n";
    return out;
}

Term parse_term(std::string_view text, const Signature &sig) { return Interpreter(sig).term(single(text)); }

Formula parse_formula(std::string_view text, const Signature &sig) { return Interpreter(sig).formula(single(text)); }

Sequent parse_sequent(std::string_view text, const Signature &sig) { return Interpreter(sig).sequent(single(text)); }

Derivation parse_derivation(std::string_view text, const Signature &sig) {
    return Interpreter(sig).node(single(text));
}

bool derivations_identical(const Derivation &a, const Derivation &b) {
    if (!lists_identical(a.conclusion.antecedent, b.conclusion.antecedent) ||
        !lists_identical(a.conclusion.succedent, b.conclusion.succedent) || !(a.rule == b.rule) ||
        a.premises.size() != b.premises.size()) {
        return false;
    }
    for (std::size_t i = 0; i < a.premises.size(); ++i) {
        if (!derivations_identical(a.premises[i], b.premises[i])) return false;
    }
    return true;
}

bool documents_equal(const ProofDocument &a, const ProofDocument &b) {
    if (a.signature.functions != b.signature.functions || a.signature.predicates != b.signature.predicates ||
        a.signature.constants != b.signature.constants || !(a.config == b.config) ||
        a.derivations.size() != b.derivations.size() || a.goals.size() != b.goals.size()) {
        return false;
    }
    for (std::size_t i = 0; i < a.derivations.size(); ++i) {
        if (a.derivations[i].name != b.derivations[i].name ||
            !derivations_identical(a.derivations[i].derivation, b.derivations[i].derivation)) {
            return false;
        }
    }
    for (std::size_t i = 0; i < a.goals.size(); ++i) {
        if (a.goals[i].name != b.goals[i].name || !lists_identical(a.goals[i].sequent.antecedent, b.goals[i].sequent.antecedent) ||
            !lists_identical(a.goals[i].sequent.succedent, b.goals[i].sequent.succedent)) {
            return false;
        }
    }
    return true;
}

}  // namespace g3eq
