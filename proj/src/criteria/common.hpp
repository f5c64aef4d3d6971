// Shared helpers for the annotation functions.
#pragma once

#include <string>
#include <vector>

#include "htolcov/criteria/annotate.hpp"

namespace htolcov::crit::detail {

struct Decision {
    LocationId loc = 0;
    ExprPtr expr;
};

/// Every if/while condition, in location order.
std::vector<Decision> decisions(const mini::LocatedProgram& p);

/// Lower-case id prefix of a criterion, e.g. "mcc", "alluses".
std::string prefix(Criterion c);

inline std::string loc_tag(LocationId l) { return "loc" + std::to_string(l); }

htl::TermPtr label(LocationId loc, ExprPtr pred, std::vector<htl::Binding> bindings = {});
ExprPtr meta(const std::string& name, Type type);

/// Collects hyperlabels and their provenance.
class Emitter {
public:
    Emitter(Criterion c, ProvenanceMap* prov) : criterion_(c), prov_(prov) {}

    void emit(const std::string& id_suffix, htl::TermPtr term, std::string construct);
    std::vector<htl::Hyperlabel> take() { return std::move(out_); }

private:
    Criterion criterion_;
    ProvenanceMap* prov_;
    std::vector<htl::Hyperlabel> out_;
};

/// Decision true and false labels, as DC emits them.
void emit_decision_labels(Emitter& em, const Decision& d);

}  // namespace htolcov::crit::detail
