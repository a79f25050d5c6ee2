#pragma once

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>

#include "bidop/phase_model.hpp"

namespace bidop {

class PanelFormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Panel plus the metadata carried in the CSV comment block.
struct PanelFile {
    PhasePanel panel;
    std::optional<std::string> profile;  // profile name, when recorded
    bool has_truth = false;
};

/**
 * Columnar panel format: '#'-prefixed key=value metadata lines
 * (profile, period_s, frames, paths, truth_*), then the header row
 * "k,path_id,phase,aoa" and one row per (frame, path). path_id 0 is the LoS,
 * 1 the target, 2.. the static paths. Phases are radians in [0, 2pi).
 */
void write_panel_csv(std::ostream& os, const PhasePanel& panel, const std::string& profile_name);

/// Throws PanelFormatError on malformed or incomplete input.
PanelFile read_panel_csv(std::istream& is);

}  // namespace bidop
