#pragma once

// FDP boxplot figure: one panel per nominal level, boxes per (s, procedure)
// cell, a cross marker at the empirical FDR and a dashed line at the nominal
// level. Pure string emission, no rendering dependencies.

#include <string>

#include "fahs/simulate.hpp"

namespace fahs {

std::string render_fdp_boxplots(const AggregateSummary& summary);
void write_fdp_boxplots(const std::string& path, const AggregateSummary& summary);

}  // namespace fahs
