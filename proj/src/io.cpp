#include "hjb/io.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>

#include <json.hpp>

#include "hjb/error.hpp"

namespace hjb::io {

std::string number(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

double round15(double v) { return std::strtod(number(v, 15).c_str(), nullptr); }

namespace {

std::string coord_header(int dim) {
  std::string s;
  for (int a = 0; a < dim; ++a) s += "x" + std::to_string(a + 1) + ",";
  return s;
}

std::string coords(const Point& x, int dim) {
  std::string s;
  for (int a = 0; a < dim; ++a) s += number(x[a], 12) + ",";
  return s;
}

}  // namespace

std::string field_csv(const ScalarField& u, const DomainMask& mask) {
  const Grid& g = mask.grid();
  std::string out = coord_header(g.dim()) + "value\n";
  for (std::size_t k = 0; k < g.size(); ++k) {
    if (mask.exterior(k)) continue;
    out += coords(g.coord(k), g.dim()) + number(u[k]) + "\n";
  }
  return out;
}

std::string residual_csv(const std::vector<double>& history) {
  std::string out = "sweep,residual\n";
  for (std::size_t i = 0; i < history.size(); ++i) out += std::to_string(i + 1) + "," + number(history[i]) + "\n";
  return out;
}

std::string regions_csv(const RegionLabeling& labeling, const DomainMask& mask) {
  const Grid& g = mask.grid();
  std::string out = coord_header(g.dim()) + "label\n";
  for (std::size_t i = 0; i < labeling.nodes.size(); ++i)
    out += coords(g.coord(labeling.nodes[i]), g.dim()) + (labeling.labels[i] == Region::Brownian ? "B\n" : "E\n");
  return out;
}

std::string interface_csv(const InterfaceEstimate& est, int dim) {
  std::string out = coord_header(dim);
  out.pop_back();
  out += "\n";
  for (const Point& c : est.cells) {
    std::string row = coords(c, dim);
    row.back() = '\n';
    out += row;
  }
  return out;
}

std::string interface_json(const InterfaceEstimate& est) {
  nlohmann::ordered_json j;
  j["rho_hat"] = est.rho_hat ? nlohmann::ordered_json(round15(*est.rho_hat)) : nlohmann::ordered_json();
  j["spread"] = est.spread ? nlohmann::ordered_json(round15(*est.spread)) : nlohmann::ordered_json();
  j["cells"] = est.cells.size();
  j["clusters"] = nlohmann::ordered_json::array();
  for (const InterfaceCluster& c : est.clusters)
    j["clusters"].push_back({{"rho_hat", round15(c.rho_hat)},
                             {"spread", round15(c.spread)},
                             {"cells", c.cells},
                             {"sharp", c.sharp}});
  return j.dump(2) + "\n";
}

void write_file(const std::filesystem::path& path, const std::string& contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::BadParameter, "cannot open " + path.string() + " for writing");
  f << contents;
  if (!f) throw Error(ErrorCode::BadParameter, "failed writing " + path.string());
}

}  // namespace hjb::io
