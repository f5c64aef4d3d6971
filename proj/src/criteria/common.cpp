#include "common.hpp"

#include <algorithm>
#include <array>
#include <cctype>

namespace htolcov::crit {

namespace {

struct NameEntry {
    Criterion criterion;
    const char* canonical;
    const char* id_prefix;
};

constexpr std::array<NameEntry, kCriterionCount> kNames{{
    {Criterion::FC, "FC", "fc"},
    {Criterion::BBC, "BBC", "bbc"},
    {Criterion::DC, "DC", "dc"},
    {Criterion::CC, "CC", "cc"},
    {Criterion::DCC, "DCC", "dcc"},
    {Criterion::MCC, "MCC", "mcc"},
    {Criterion::GACC, "GACC", "gacc"},
    {Criterion::WMPrime, "WM'", "wm"},
    {Criterion::CACC, "CACC", "cacc"},
    {Criterion::RACC, "RACC", "racc"},
    {Criterion::FCC, "FCC", "fcc"},
    {Criterion::BPC, "BPC", "bpc"},
    {Criterion::AllDefs, "ALL_DEFS", "alldefs"},
    {Criterion::AllUses, "ALL_USES", "alluses"},
}};

const NameEntry& entry(Criterion c) { return kNames[static_cast<std::size_t>(c)]; }

}  // namespace

const char* name(Criterion c) { return entry(c).canonical; }

std::optional<Criterion> parse_criterion(std::string_view text) {
    std::string up;
    for (char ch : text) up.push_back(ch == '-' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(ch))));
    if (up == "WM" || up == "WMP") return Criterion::WMPrime;
    for (const NameEntry& e : kNames)
        if (up == e.canonical) return e.criterion;
    return std::nullopt;
}

std::vector<Criterion> all_criteria() {
    std::vector<Criterion> out;
    for (const NameEntry& e : kNames) out.push_back(e.criterion);
    return out;
}

namespace detail {

std::vector<Decision> decisions(const mini::LocatedProgram& p) {
    std::vector<Decision> out;
    for (const mini::LocationInfo& info : p.locations)
        if (info.is_decision()) out.push_back({info.id, info.stmt->value});
    return out;
}

std::string prefix(Criterion c) { return entry(c).id_prefix; }

htl::TermPtr label(LocationId loc, ExprPtr pred, std::vector<htl::Binding> bindings) {
    return htl::make_label({loc, std::move(pred), std::move(bindings)});
}

ExprPtr meta(const std::string& name, Type type) { return make_var(name, VarRole::Meta, -1, type); }

void Emitter::emit(const std::string& id_suffix, htl::TermPtr term, std::string construct) {
    std::string id = prefix(criterion_) + "_" + id_suffix;
    if (prov_) (*prov_)[id] = Provenance{criterion_, std::move(construct)};
    out_.push_back({std::move(id), name(criterion_), std::move(term)});
}

}  // namespace detail

}  // namespace htolcov::crit
