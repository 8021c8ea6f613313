#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mrgark/couplings.hpp"
#include "mrgark/tableau.hpp"

namespace mrgark {

/// Base tableaus used by the catalog.
RkTableau ssp2_base();
RkTableau radau1a_base();
RkTableau radau2a_base();
RkTableau explicit_midpoint_base();
RkTableau heun3_base();

enum class Ssp2Coupling { Decoupled, FirstFast, LastSlow };

MrGarkScheme make_mrk_radau1a(int M);

/// The published coefficient set labelled RADAU-IIA repeats the RADAU-IA base
/// tableau; `corrected_base = true` swaps in the standard RADAU-IIA tableau,
/// which is the base the printed couplings actually match.
MrGarkScheme make_mrk_radau2a(int M, bool corrected_base = false);

MrGarkScheme make_add_stable2(int M);
MrGarkScheme make_add_stable3_radau(int M);
MrGarkScheme make_ssp2_mr(int M, Ssp2Coupling coupling);
MrGarkScheme make_table3_2stage(const RkTableau& base, int M);

/// Order-2 explicit midpoint outer with an SSP2 inner step.
MisPair default_mis_pair();

struct CatalogEntry {
    std::string name;
    int M = 1;
    std::string variant;
    std::optional<MrGarkScheme> scheme;
    std::optional<FlatGarkTableau> flat_only;  ///< set for tableau-level entries (mis)
    std::optional<double> mis_order3;          ///< MIS third-order residual, when applicable
    int documented_order = 0;
    std::string summary;
    std::string note;

    FlatGarkTableau flat() const;
    bool is_telescopic() const;
};

/// Named factory; variant selects documented alternatives
/// ("corrected-base" for mrk-radau2a-3). Throws std::invalid_argument for
/// unknown names or variants.
CatalogEntry make_scheme(const std::string& name, int M, const std::string& variant = "");

std::vector<std::string> catalog_names();

}  // namespace mrgark
