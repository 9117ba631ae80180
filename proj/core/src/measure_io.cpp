#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

#include "liewalk/errors.hpp"
#include "liewalk/walk.hpp"

namespace liewalk {

MeasureParse parse_measure(std::istream& in, bool symmetric) {
  std::vector<Atom> atoms;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream fields(line);
    double w = 0.0, ar = 0.0, ai = 0.0, br = 0.0, bi = 0.0;
    if (!(fields >> w >> ar >> ai >> br >> bi)) throw ParseError("expected 'w re(a) im(a) re(b) im(b)'", line_no);
    std::string extra;
    if (fields >> extra) throw ParseError("unexpected trailing field '" + extra + "'", line_no);
    if (!(w >= 0.0) || !std::isfinite(w)) throw ParseError("weight must be a nonnegative number", line_no);
    const double norm2 = ar * ar + ai * ai + br * br + bi * bi;
    if (!std::isfinite(norm2) || std::abs(norm2 - 1.0) > 1e-10) {
      throw ParseError("|a|^2 + |b|^2 must equal 1", line_no);
    }
    atoms.push_back({su2_block(Complex(ar, ai), Complex(br, bi)), w});
  }
  if (atoms.empty()) throw ParseError("no atoms", 0);
  MeasureParse out;
  double total = 0.0;
  for (const Atom& a : atoms) total += a.weight;
  if (!(total > 0.0)) throw ParseError("weights sum to zero", 0);
  if (std::abs(total - 1.0) > 1e-9) {
    std::ostringstream msg;
    msg << "weights sum to " << std::setprecision(17) << total << "; renormalized";
    out.warnings.push_back(msg.str());
  }
  for (Atom& a : atoms) a.weight /= total;
  out.measure = LocalMeasure::from_atoms(std::move(atoms), symmetric);
  return out;
}

MeasureParse read_measure_file(const std::string& path, bool symmetric) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open measure file '" + path + "'", 0);
  return parse_measure(in, symmetric);
}

void write_measure(std::ostream& out, const LocalMeasure& eta) {
  if (eta.kind() != LocalMeasure::Kind::atoms) throw PreconditionError("write_measure: Haar has no atom list");
  out << std::setprecision(17);
  for (const Atom& a : eta.atoms()) {
    const Complex x = a.element(0, 0);
    const Complex y = a.element(1, 0);
    out << a.weight << ' ' << x.real() << ' ' << x.imag() << ' ' << y.real() << ' ' << y.imag() << '\n';
  }
}

}  // namespace liewalk
