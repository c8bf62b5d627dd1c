#include "sing/pddl.h"

#include <algorithm>
#include <cctype>
#include <functional>
#include <map>
#include <set>
#include <sstream>

using namespace std;

namespace sing::pddl {
ParseError::ParseError(const string &message, int line, int column)
    : runtime_error("line " + to_string(line) + ", column " +
                    to_string(column) + ": " + message),
      line_(line), column_(column) {
}

UnsupportedFeature::UnsupportedFeature(const string &feature)
    : runtime_error("unsupported PDDL feature: " + feature),
      feature_(feature) {
}

namespace {
struct SExpr {
    bool is_list = false;
    string token;
    vector<SExpr> items;
    int line = 0;
    int column = 0;

    bool is_token(const string &t) const {
        return !is_list && token == t;
    }
};

class Reader {
    string_view text;
    size_t pos = 0;
    int line = 1;
    int column = 1;

    void advance() {
        if (text[pos] == '\n') {
            ++line;
            column = 1;
        } else {
            ++column;
        }
        ++pos;
    }

    void skip_space() {
        while (pos < text.size()) {
            char c = text[pos];
            if (c == ';') {
                while (pos < text.size() && text[pos] != '\n')
                    advance();
            } else if (isspace(static_cast<unsigned char>(c))) {
                advance();
            } else {
                break;
            }
        }
    }

    SExpr read_expr() {
        skip_space();
        if (pos >= text.size())
            throw ParseError("unexpected end of input", line, column);
        SExpr expr;
        expr.line = line;
        expr.column = column;
        char c = text[pos];
        if (c == ')')
            throw ParseError("unexpected ')'", line, column);
        if (c == '(') {
            expr.is_list = true;
            advance();
            while (true) {
                skip_space();
                if (pos >= text.size())
                    throw ParseError("unbalanced '(' opened here", expr.line,
                                     expr.column);
                if (text[pos] == ')') {
                    advance();
                    break;
                }
                expr.items.push_back(read_expr());
            }
            return expr;
        }
        while (pos < text.size()) {
            char d = text[pos];
            if (isspace(static_cast<unsigned char>(d)) || d == '(' ||
                d == ')' || d == ';')
                break;
            expr.token.push_back(
                static_cast<char>(tolower(static_cast<unsigned char>(d))));
            advance();
        }
        return expr;
    }

public:
    explicit Reader(string_view text)
        : text(text) {
    }

    SExpr read_document() {
        SExpr doc = read_expr();
        skip_space();
        if (pos < text.size())
            throw ParseError("trailing content after definition", line,
                             column);
        return doc;
    }
};

[[noreturn]] void fail(const SExpr &at, const string &message) {
    throw ParseError(message, at.line, at.column);
}

const SExpr &expect_list(const SExpr &e, const string &what) {
    if (!e.is_list)
        fail(e, "expected " + what + ", found '" + e.token + "'");
    return e;
}

const string &expect_token(const SExpr &e, const string &what) {
    if (e.is_list)
        fail(e, "expected " + what + ", found a list");
    return e.token;
}

string requirement_feature(const string &req) {
    static const map<string, string> names = {
        {":conditional-effects", "conditional effects"},
        {":negative-preconditions", "negative preconditions"},
        {":disjunctive-preconditions", "disjunctive preconditions"},
        {":existential-preconditions", "quantifiers"},
        {":universal-preconditions", "quantifiers"},
        {":quantified-preconditions", "quantifiers"},
        {":derived-predicates", "axioms"},
        {":action-costs", "action costs"},
        {":numeric-fluents", "numeric fluents"},
        {":fluents", "numeric fluents"},
        {":durative-actions", "durative actions"},
        {":equality", "equality"},
        {":adl", "adl"},
    };
    auto it = names.find(req);
    return it == names.end() ? req.substr(1) : it->second;
}

// Parses "a b - t c - u d" into typed names; untyped names get ROOT_TYPE.
vector<TypedName> parse_typed_list(const vector<SExpr> &items, size_t begin,
                                   bool variables) {
    vector<TypedName> result;
    size_t pending = 0;
    for (size_t i = begin; i < items.size(); ++i) {
        const SExpr &item = items[i];
        if (item.is_list)
            fail(item, "unexpected list in typed list");
        if (item.token == "-") {
            if (i + 1 >= items.size())
                fail(item, "missing type after '-'");
            const SExpr &type = items[i + 1];
            if (type.is_list) {
                if (!type.items.empty() && type.items[0].is_token("either"))
                    throw UnsupportedFeature("either types");
                fail(type, "expected type name");
            }
            if (pending == 0)
                fail(item, "type '" + type.token + "' applies to no names");
            for (size_t k = result.size() - pending; k < result.size(); ++k)
                result[k].type = type.token;
            pending = 0;
            ++i;
            continue;
        }
        if (variables && item.token.front() != '?')
            fail(item, "expected variable, found '" + item.token + "'");
        if (!variables && item.token.front() == '?')
            fail(item, "unexpected variable '" + item.token + "'");
        result.push_back({item.token, ROOT_TYPE});
        ++pending;
    }
    return result;
}

Atom parse_atom(const SExpr &e) {
    expect_list(e, "atom");
    if (e.items.empty())
        fail(e, "empty atom");
    Atom atom;
    atom.predicate = expect_token(e.items[0], "predicate name");
    if (atom.predicate == "=")
        throw UnsupportedFeature("equality");
    for (size_t i = 1; i < e.items.size(); ++i)
        atom.args.push_back(expect_token(e.items[i], "argument"));
    return atom;
}

vector<const SExpr *> conjuncts(const SExpr &e) {
    expect_list(e, "condition");
    vector<const SExpr *> result;
    if (e.items.empty())
        return result;
    if (e.items[0].is_token("and")) {
        for (size_t i = 1; i < e.items.size(); ++i)
            for (const SExpr *c : conjuncts(e.items[i]))
                result.push_back(c);
    } else {
        result.push_back(&e);
    }
    return result;
}

vector<Atom> parse_condition(const SExpr &e) {
    vector<Atom> atoms;
    for (const SExpr *c : conjuncts(e)) {
        const string &head = c->items[0].is_list ? "" : c->items[0].token;
        if (head == "not")
            throw UnsupportedFeature("negative preconditions");
        if (head == "or" || head == "imply")
            throw UnsupportedFeature("disjunctive preconditions");
        if (head == "forall" || head == "exists")
            throw UnsupportedFeature("quantifiers");
        atoms.push_back(parse_atom(*c));
    }
    return atoms;
}

void parse_effect(const SExpr &e, ActionSchema &schema) {
    for (const SExpr *c : conjuncts(e)) {
        const string &head = c->items[0].is_list ? "" : c->items[0].token;
        if (head == "when")
            throw UnsupportedFeature("conditional effects");
        if (head == "forall")
            throw UnsupportedFeature("quantifiers");
        if (head == "increase" || head == "decrease" || head == "assign" ||
            head == "scale-up" || head == "scale-down")
            throw UnsupportedFeature("action costs");
        if (head == "not") {
            if (c->items.size() != 2)
                fail(*c, "malformed negative effect");
            schema.del_effects.push_back(parse_atom(c->items[1]));
        } else {
            schema.add_effects.push_back(parse_atom(*c));
        }
    }
}

ActionSchema parse_action(const SExpr &e) {
    if (e.items.size() < 2)
        fail(e, "action without name");
    ActionSchema schema;
    schema.name = expect_token(e.items[1], "action name");
    for (size_t i = 2; i < e.items.size(); i += 2) {
        const string &key = expect_token(e.items[i], "action keyword");
        if (i + 1 >= e.items.size())
            fail(e.items[i], "missing value for " + key);
        const SExpr &value = e.items[i + 1];
        if (key == ":parameters") {
            schema.params =
                parse_typed_list(expect_list(value, "parameter list").items,
                                 0, true);
        } else if (key == ":precondition") {
            schema.precondition = parse_condition(value);
        } else if (key == ":effect") {
            parse_effect(value, schema);
        } else {
            fail(e.items[i], "unknown action keyword '" + key + "'");
        }
    }
    return schema;
}

void check_header(const SExpr &doc, const string &kind, string &name) {
    expect_list(doc, "(define ...)");
    if (doc.items.size() < 2 || !doc.items[0].is_token("define"))
        fail(doc, "expected (define ...)");
    const SExpr &head = expect_list(doc.items[1], "(" + kind + " name)");
    if (head.items.size() != 2 || !head.items[0].is_token(kind))
        fail(head, "expected (" + kind + " name)");
    name = expect_token(head.items[1], kind + " name");
}

// Name resolution within a domain.
class DomainIndex {
    const DomainAst &domain;
    set<string> types;
    map<string, string> parent;
    map<string, const PredicateDecl *> predicates;

public:
    explicit DomainIndex(const DomainAst &d)
        : domain(d) {
        types.insert(ROOT_TYPE);
        for (const auto &[type, super] : d.types) {
            types.insert(type);
            types.insert(super);
            if (type != ROOT_TYPE)
                parent[type] = super;
        }
        for (const auto &[type, super] : d.types)
            if (!parent.count(super) && super != ROOT_TYPE)
                parent[super] = ROOT_TYPE;
        for (const PredicateDecl &p : d.predicates)
            predicates[p.name] = &p;
    }

    bool has_type(const string &t) const {
        return types.count(t) > 0;
    }

    bool is_subtype(string t, const string &of) const {
        for (size_t guard = 0; guard <= types.size(); ++guard) {
            if (t == of)
                return true;
            auto it = parent.find(t);
            if (it == parent.end())
                return false;
            t = it->second;
        }
        return false;
    }

    const PredicateDecl *predicate(const string &name) const {
        auto it = predicates.find(name);
        return it == predicates.end() ? nullptr : it->second;
    }

    const DomainAst &ast() const {
        return domain;
    }
};

template<typename Error>
void check_atom(const DomainIndex &index, const Atom &atom,
                const map<string, string> &arg_types, const string &where) {
    const PredicateDecl *decl = index.predicate(atom.predicate);
    if (!decl)
        throw Error("undeclared predicate '" + atom.predicate + "' in " +
                    where);
    if (decl->params.size() != atom.args.size())
        throw Error("predicate '" + atom.predicate + "' expects " +
                    to_string(decl->params.size()) + " arguments in " + where);
    for (size_t i = 0; i < atom.args.size(); ++i) {
        auto it = arg_types.find(atom.args[i]);
        if (it == arg_types.end())
            throw Error("undeclared " +
                        string(atom.args[i][0] == '?' ? "variable" : "object") +
                        " '" + atom.args[i] + "' in " + where);
        const string &expected = decl->params[i].type;
        // a parameter may be declared with a supertype; binding decides
        if (!index.is_subtype(it->second, expected) &&
            !index.is_subtype(expected, it->second))
            throw Error("argument '" + atom.args[i] + "' of '" +
                        atom.predicate + "' has incompatible type '" +
                        it->second + "' in " + where);
    }
}

template<typename Error>
void check_domain(const DomainIndex &index) {
    const DomainAst &d = index.ast();
    for (const auto &[type, super] : d.types)
        if (index.is_subtype(super, type) && super != type)
            throw Error("cyclic type hierarchy at '" + type + "'");
    set<string> seen;
    for (const PredicateDecl &p : d.predicates) {
        if (!seen.insert(p.name).second)
            throw Error("predicate '" + p.name + "' declared twice");
        for (const TypedName &param : p.params)
            if (!index.has_type(param.type))
                throw Error("undeclared type '" + param.type +
                            "' in predicate '" + p.name + "'");
    }
    map<string, string> constants;
    for (const TypedName &c : d.constants) {
        if (!index.has_type(c.type))
            throw Error("undeclared type '" + c.type + "' of constant '" +
                        c.name + "'");
        constants[c.name] = c.type;
    }
    for (const ActionSchema &a : d.actions) {
        map<string, string> scope = constants;
        for (const TypedName &param : a.params) {
            if (!index.has_type(param.type))
                throw Error("undeclared type '" + param.type +
                            "' in action '" + a.name + "'");
            if (!scope.emplace(param.name, param.type).second)
                throw Error("duplicate parameter '" + param.name +
                            "' in action '" + a.name + "'");
        }
        string where = "action '" + a.name + "'";
        for (const Atom &atom : a.precondition)
            check_atom<Error>(index, atom, scope, where);
        for (const Atom &atom : a.add_effects)
            check_atom<Error>(index, atom, scope, where);
        for (const Atom &atom : a.del_effects)
            check_atom<Error>(index, atom, scope, where);
    }
}

template<typename Error>
map<string, string> check_problem(const DomainIndex &index,
                                  const ProblemAst &p) {
    map<string, string> objects;
    for (const TypedName &c : index.ast().constants)
        objects[c.name] = c.type;
    for (const TypedName &o : p.objects) {
        if (!index.has_type(o.type))
            throw Error("undeclared type '" + o.type + "' of object '" +
                        o.name + "'");
        objects[o.name] = o.type;
    }
    for (const Atom &atom : p.init)
        check_atom<Error>(index, atom, objects, "initial state");
    for (const Atom &atom : p.goal)
        check_atom<Error>(index, atom, objects, "goal");
    return objects;
}

struct SemanticError : runtime_error {
    using runtime_error::runtime_error;
};
}

DomainAst parse_domain(string_view text) {
    SExpr doc = Reader(text).read_document();
    DomainAst domain;
    check_header(doc, "domain", domain.name);
    for (size_t i = 2; i < doc.items.size(); ++i) {
        const SExpr &section = expect_list(doc.items[i], "domain section");
        if (section.items.empty())
            fail(section, "empty section");
        const string &key = expect_token(section.items[0], "section keyword");
        if (key == ":requirements") {
            for (size_t k = 1; k < section.items.size(); ++k) {
                const string &req =
                    expect_token(section.items[k], "requirement");
                if (req != ":strips" && req != ":typing")
                    throw UnsupportedFeature(requirement_feature(req));
                domain.requirements.push_back(req);
            }
        } else if (key == ":types") {
            for (const TypedName &t : parse_typed_list(section.items, 1, false))
                domain.types.emplace_back(t.name, t.type);
        } else if (key == ":constants") {
            domain.constants = parse_typed_list(section.items, 1, false);
        } else if (key == ":predicates") {
            for (size_t k = 1; k < section.items.size(); ++k) {
                const SExpr &decl =
                    expect_list(section.items[k], "predicate declaration");
                if (decl.items.empty())
                    fail(decl, "empty predicate declaration");
                PredicateDecl pred;
                pred.name = expect_token(decl.items[0], "predicate name");
                pred.params = parse_typed_list(decl.items, 1, true);
                domain.predicates.push_back(move(pred));
            }
        } else if (key == ":action") {
            domain.actions.push_back(parse_action(section));
        } else if (key == ":functions") {
            throw UnsupportedFeature("action costs");
        } else if (key == ":derived") {
            throw UnsupportedFeature("axioms");
        } else if (key == ":durative-action") {
            throw UnsupportedFeature("durative actions");
        } else {
            fail(section.items[0], "unknown domain section '" + key + "'");
        }
    }
    try {
        check_domain<SemanticError>(DomainIndex(domain));
    } catch (const SemanticError &e) {
        throw ParseError(e.what(), doc.line, doc.column);
    }
    return domain;
}

ProblemAst parse_problem(string_view text) {
    SExpr doc = Reader(text).read_document();
    ProblemAst problem;
    check_header(doc, "problem", problem.name);
    for (size_t i = 2; i < doc.items.size(); ++i) {
        const SExpr &section = expect_list(doc.items[i], "problem section");
        if (section.items.empty())
            fail(section, "empty section");
        const string &key = expect_token(section.items[0], "section keyword");
        if (key == ":domain") {
            if (section.items.size() != 2)
                fail(section, "expected (:domain name)");
            problem.domain_name = expect_token(section.items[1], "domain name");
        } else if (key == ":objects") {
            problem.objects = parse_typed_list(section.items, 1, false);
        } else if (key == ":init") {
            for (size_t k = 1; k < section.items.size(); ++k) {
                const SExpr &item = section.items[k];
                if (item.is_list && !item.items.empty() &&
                    item.items[0].is_token("="))
                    throw UnsupportedFeature("action costs");
                problem.init.push_back(parse_atom(item));
            }
        } else if (key == ":goal") {
            if (section.items.size() != 2)
                fail(section, "expected (:goal condition)");
            problem.goal = parse_condition(section.items[1]);
        } else if (key == ":metric") {
            throw UnsupportedFeature("action costs");
        } else if (key == ":requirements") {
            for (size_t k = 1; k < section.items.size(); ++k) {
                const string &req =
                    expect_token(section.items[k], "requirement");
                if (req != ":strips" && req != ":typing")
                    throw UnsupportedFeature(requirement_feature(req));
            }
        } else {
            fail(section.items[0], "unknown problem section '" + key + "'");
        }
    }
    return problem;
}

pair<DomainAst, ProblemAst> parse_pddl(string_view domain_text,
                                       string_view problem_text) {
    DomainAst domain = parse_domain(domain_text);
    ProblemAst problem = parse_problem(problem_text);
    if (!problem.domain_name.empty() && problem.domain_name != domain.name)
        throw ParseError("problem refers to domain '" + problem.domain_name +
                             "' but domain is '" + domain.name + "'",
                         1, 1);
    try {
        check_problem<SemanticError>(DomainIndex(domain), problem);
    } catch (const SemanticError &e) {
        throw ParseError(e.what(), 1, 1);
    }
    return {move(domain), move(problem)};
}

namespace {
string typed_list(const vector<TypedName> &names) {
    string out;
    for (size_t i = 0; i < names.size(); ++i) {
        if (i)
            out += ' ';
        out += names[i].name + " - " + names[i].type;
    }
    return out;
}

string atom_text(const Atom &atom) {
    string out = "(" + atom.predicate;
    for (const string &arg : atom.args)
        out += " " + arg;
    return out + ")";
}

string conjunction(const vector<Atom> &atoms, const vector<Atom> &negated,
                   const string &indent) {
    string out = "(and";
    for (const Atom &a : atoms)
        out += "\n" + indent + "  " + atom_text(a);
    for (const Atom &a : negated)
        out += "\n" + indent + "  (not " + atom_text(a) + ")";
    return out + ")";
}
}

string to_pddl(const DomainAst &domain) {
    ostringstream out;
    out << "(define (domain " << domain.name << ")\n";
    if (!domain.requirements.empty()) {
        out << "  (:requirements";
        for (const string &r : domain.requirements)
            out << " " << r;
        out << ")\n";
    }
    if (!domain.types.empty()) {
        out << "  (:types";
        for (const auto &[type, super] : domain.types)
            out << " " << type << " - " << super;
        out << ")\n";
    }
    if (!domain.constants.empty())
        out << "  (:constants " << typed_list(domain.constants) << ")\n";
    out << "  (:predicates";
    for (const PredicateDecl &p : domain.predicates) {
        out << "\n    (" << p.name;
        if (!p.params.empty())
            out << " " << typed_list(p.params);
        out << ")";
    }
    out << ")\n";
    for (const ActionSchema &a : domain.actions) {
        out << "  (:action " << a.name << "\n";
        out << "    :parameters (" << typed_list(a.params) << ")\n";
        out << "    :precondition " << conjunction(a.precondition, {}, "    ")
            << "\n";
        out << "    :effect "
            << conjunction(a.add_effects, a.del_effects, "    ") << ")\n";
    }
    out << ")\n";
    return out.str();
}

string to_pddl(const ProblemAst &problem) {
    ostringstream out;
    out << "(define (problem " << problem.name << ")\n";
    if (!problem.domain_name.empty())
        out << "  (:domain " << problem.domain_name << ")\n";
    out << "  (:objects " << typed_list(problem.objects) << ")\n";
    out << "  (:init";
    for (const Atom &a : problem.init)
        out << "\n    " << atom_text(a);
    out << ")\n";
    out << "  (:goal " << conjunction(problem.goal, {}, "  ") << "))\n";
    return out.str();
}

StripsTask ground_checked(const DomainAst &, const ProblemAst &,
                          const GroundingOptions &,
                          const map<string, string> &,
                          const function<bool(const string &, const string &)> &);

StripsTask ground(const DomainAst &domain, const ProblemAst &problem,
                  const GroundingOptions &options) {
    DomainIndex index(domain);
    check_domain<GroundingError>(index);
    map<string, string> objects = check_problem<GroundingError>(index, problem);
    return ground_checked(domain, problem, options, objects,
                          [&index](const string &t, const string &of) {
                              return index.is_subtype(t, of);
                          });
}
}
