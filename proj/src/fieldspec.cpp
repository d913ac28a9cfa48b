#include "slicegeo/fieldspec.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

#include "slicegeo/errors.hpp"

namespace slicegeo {

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) parts.push_back(item);
  return parts;
}

double parse_number(const std::string& s, const std::string& what) {
  try {
    size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw_error(ErrorKind::config_error, "cannot parse " + what + " from '" + s + "'");
  }
}

ScalarField load_samples(const std::string& filename, const Grid& grid) {
  std::ifstream in(filename);
  if (!in) throw_error(ErrorKind::config_error, "cannot open sample file '" + filename + "'");
  std::vector<double> values;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const std::vector<std::string> cols = split(line, ',');
    const std::string& cell = cols.size() >= 2 ? cols[1] : cols[0];
    if (values.empty() && cell.find_first_not_of("+-.0123456789eE") != std::string::npos)
      continue;  // header row
    values.push_back(parse_number(cell, "sample value"));
  }
  if (static_cast<int>(values.size()) != grid.n)
    throw_error(ErrorKind::config_error, "sample file '" + filename + "' has " +
                                             std::to_string(values.size()) + " rows, expected " +
                                             std::to_string(grid.n));
  return ScalarField(grid, std::move(values));
}

}  // namespace

ScalarField parse_field(const std::string& spec, const Grid& grid) {
  const std::vector<std::string> parts = split(spec, ':');
  if (parts.empty()) throw_error(ErrorKind::config_error, "empty field spec");

  if (parts[0] == "const" && parts.size() == 2)
    return ScalarField(grid, parse_number(parts[1], "constant"));

  if (parts[0] == "harmonic" && (parts.size() == 3 || parts.size() == 4)) {
    const int k = static_cast<int>(parse_number(parts[1], "harmonic index"));
    const double amp = parts.size() == 4 ? parse_number(parts[3], "amplitude") : 1.0;
    const bool use_cos = parts[2] == "cos";
    if (!use_cos && parts[2] != "sin")
      throw_error(ErrorKind::config_error, "harmonic phase must be cos or sin");
    return ScalarField::sampled(
        grid, [&](double x) { return amp * (use_cos ? std::cos(k * x) : std::sin(k * x)); });
  }

  if (parts[0] == "samples" && parts.size() == 2 && !parts[1].empty() && parts[1][0] == '@')
    return load_samples(parts[1].substr(1), grid);

  if (parts.size() == 1) return ScalarField(grid, parse_number(parts[0], "field constant"));

  throw_error(ErrorKind::config_error, "unrecognized field spec '" + spec + "'");
}

MetricField parse_reference_metric(const std::string& spec, const Grid& grid,
                                   const SpacetimeModel& model) {
  auto slice_metric = [&](double t) {
    ScalarField a(grid);
    for (int i = 0; i < grid.n; ++i) a[i] = model.metric(grid.point(i), t);
    return MetricField(std::move(a));
  };

  if (spec == "g0") return slice_metric(0.0);

  const std::vector<std::string> parts = split(spec, ':');
  if (parts[0] == "gt" && parts.size() == 2) return slice_metric(parse_number(parts[1], "time"));
  if (parts[0] == "const" && parts.size() == 2) {
    const double v = parse_number(parts[1], "metric constant");
    if (!(v > 0.0)) throw_error(ErrorKind::config_error, "metric constant must be positive");
    return MetricField::constant(grid, v);
  }
  if (parts[0] == "scale" && parts.size() >= 3) {
    const double k = parse_number(parts[1], "scale factor");
    if (!(k > 0.0)) throw_error(ErrorKind::config_error, "scale factor must be positive");
    std::string inner = parts[2];
    for (size_t i = 3; i < parts.size(); ++i) inner += ":" + parts[i];
    const MetricField base = parse_reference_metric(inner, grid, model);
    return MetricField(base.coeff() * k);
  }
  throw_error(ErrorKind::config_error, "unrecognized metric spec '" + spec + "'");
}

}  // namespace slicegeo
