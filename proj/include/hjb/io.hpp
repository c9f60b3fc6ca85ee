#pragma once

// Plot-ready text exports. Formatting is fixed so that identical inputs give
// byte-identical files.

#include <filesystem>
#include <string>
#include <vector>

#include "hjb/free_boundary.hpp"
#include "hjb/grid.hpp"

namespace hjb::io {

/// printf %.{digits}g.
std::string number(double v, int digits = 15);

/// Parses back through the decimal form so JSON output carries 15 digits.
double round15(double v);

/// Header x1,...,xd,value; one row per non-Exterior node; coordinates with
/// 12 significant digits.
std::string field_csv(const ScalarField& u, const DomainMask& mask);

/// Header sweep,residual; sweeps counted from 1.
std::string residual_csv(const std::vector<double>& history);

/// Header x1,...,xd,label with label B or E, Interior nodes only.
std::string regions_csv(const RegionLabeling& labeling, const DomainMask& mask);

/// Header x1,...,xd; one row per interface cell centre.
std::string interface_csv(const InterfaceEstimate& est, int dim);

/// {"rho_hat", "spread", "cells", "clusters": [...]}; null radial fields on
/// non-radial domains.
std::string interface_json(const InterfaceEstimate& est);

void write_file(const std::filesystem::path& path, const std::string& contents);

}  // namespace hjb::io
