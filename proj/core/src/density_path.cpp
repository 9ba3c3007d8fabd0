#include "ppme/density_path.hpp"

#include <ostream>
#include <stdexcept>
#include <string>

#include "ppme/csv.hpp"

namespace ppme {

void DensityPath::push_back(DensityMatrix rho) {
  trace.push_back(rho.trace());
  hermiticity_residual.push_back(ppme::hermiticity_residual(rho.matrix()));
  min_eigenvalue.push_back(ppme::min_eigenvalue(rho));
  states.push_back(std::move(rho));
}

void write_density_csv(std::ostream& out, const DensityPath& path,
                       const std::vector<ExtraColumn>& extras) {
  for (const auto& e : extras) {
    if (e.values.size() < path.size()) {
      throw std::invalid_argument("write_density_csv: extra column '" + e.name + "' too short");
    }
  }
  std::vector<std::string> names{"t",        "rho00",    "rho11",    "rho22",   "re_rho01",
                                 "im_rho01", "re_rho02", "im_rho02", "re_rho12", "im_rho12",
                                 "trace",    "min_eig",  "n00",      "n11",     "n22"};
  for (const auto& e : extras) names.push_back(e.name);
  CsvWriter csv(out);
  csv.header(names);
  std::vector<CsvWriter::Field> row;
  for (std::size_t k = 0; k < path.size(); ++k) {
    const auto& rho = path.states[k];
    const double tr = path.trace[k];
    row.clear();
    row.emplace_back(path.time(k));
    for (int l = 0; l < 3; ++l) row.emplace_back(rho.population(l));
    for (auto [a, b] : {std::pair{0, 1}, std::pair{0, 2}, std::pair{1, 2}}) {
      const Complex z = rho.element(a, b);
      row.emplace_back(z.real());
      row.emplace_back(z.imag());
    }
    row.emplace_back(tr);
    row.emplace_back(path.min_eigenvalue[k]);
    for (int l = 0; l < 3; ++l) row.emplace_back(rho.population(l) / tr);
    for (const auto& e : extras) row.emplace_back(e.values[k]);
    csv.row(row);
  }
}

}  // namespace ppme
