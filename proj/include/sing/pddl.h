#ifndef SING_PDDL_H
#define SING_PDDL_H

#include "strips_task.h"

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

/*
  Reader for the :strips + :typing fragment of PDDL. Keywords and names are
  case-insensitive and are stored lower-cased. Anything outside the fragment
  raises UnsupportedFeature naming the construct.
*/
namespace sing::pddl {
inline constexpr const char *ROOT_TYPE = "object";

struct TypedName {
    std::string name;
    std::string type = ROOT_TYPE;

    bool operator==(const TypedName &) const = default;
};

// Arguments are either variables ("?x") or object/constant names.
struct Atom {
    std::string predicate;
    std::vector<std::string> args;

    bool operator==(const Atom &) const = default;
};

struct PredicateDecl {
    std::string name;
    std::vector<TypedName> params;

    bool operator==(const PredicateDecl &) const = default;
};

struct ActionSchema {
    std::string name;
    std::vector<TypedName> params;
    std::vector<Atom> precondition;
    std::vector<Atom> add_effects;
    std::vector<Atom> del_effects;

    bool operator==(const ActionSchema &) const = default;
};

struct DomainAst {
    std::string name;
    std::vector<std::string> requirements;
    // (type, supertype)
    std::vector<std::pair<std::string, std::string>> types;
    std::vector<TypedName> constants;
    std::vector<PredicateDecl> predicates;
    std::vector<ActionSchema> actions;

    bool operator==(const DomainAst &) const = default;
};

struct ProblemAst {
    std::string name;
    std::string domain_name;
    std::vector<TypedName> objects;
    std::vector<Atom> init;
    std::vector<Atom> goal;

    bool operator==(const ProblemAst &) const = default;
};

class ParseError : public std::runtime_error {
    int line_;
    int column_;

public:
    ParseError(const std::string &message, int line, int column);
    int line() const {
        return line_;
    }
    int column() const {
        return column_;
    }
};

class UnsupportedFeature : public std::runtime_error {
    std::string feature_;

public:
    explicit UnsupportedFeature(const std::string &feature);
    const std::string &feature() const {
        return feature_;
    }
};

class GroundingError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

DomainAst parse_domain(std::string_view text);
ProblemAst parse_problem(std::string_view text);

// Parses both files and checks the problem against the domain.
std::pair<DomainAst, ProblemAst> parse_pddl(std::string_view domain_text,
                                            std::string_view problem_text);

std::string to_pddl(const DomainAst &domain);
std::string to_pddl(const ProblemAst &problem);

struct GroundingOptions {
    std::size_t max_actions = 10'000'000;
    // Parameters of one schema bind pairwise distinct objects.
    bool distinct_parameters = true;
    // Predicates that no schema changes are evaluated against the initial
    // state and left out of the fact set.
    bool compile_static_predicates = true;
};

StripsTask ground(const DomainAst &domain, const ProblemAst &problem,
                  const GroundingOptions &options = {});
}

#endif
