#include <set>

#include "common.hpp"

namespace htolcov::crit {

namespace {

std::vector<htl::Hyperlabel> dispatch(const mini::LocatedProgram& p, Criterion c, const AnnotateOptions& options,
                                      ProvenanceMap* prov) {
    switch (c) {
    case Criterion::FC:
    case Criterion::BBC:
    case Criterion::DC: return annotate_structural(p, c, prov);
    case Criterion::CC:
    case Criterion::DCC:
    case Criterion::MCC:
    case Criterion::GACC:
    case Criterion::CACC:
    case Criterion::RACC: return annotate_logic(p, c, prov);
    case Criterion::WMPrime: return annotate_wm_prime(p, prov);
    case Criterion::FCC: return annotate_fcc(p, prov);
    case Criterion::BPC: return annotate_bpc(p, prov);
    case Criterion::AllDefs:
    case Criterion::AllUses: return annotate_dataflow(p, c, options.array_cells, prov);
    }
    throw Error("unsupported criterion");
}

}  // namespace

AnnotatedProgram annotate(const mini::ProgramPtr& p, const std::vector<Criterion>& criteria,
                          const AnnotateOptions& options) {
    AnnotatedProgram out;
    out.program = p;
    std::set<Criterion> seen;
    for (Criterion c : criteria) {
        if (!seen.insert(c).second) continue;
        auto hs = dispatch(*p, c, options, &out.provenance);
        out.hyperlabels.insert(out.hyperlabels.end(), hs.begin(), hs.end());
    }
    return out;
}

AnnotatedProgram annotate(const mini::ProgramPtr& p, Criterion c, const AnnotateOptions& options) {
    return annotate(p, std::vector<Criterion>{c}, options);
}

}  // namespace htolcov::crit
