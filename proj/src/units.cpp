#include "becoct/units.hpp"

#include "becoct/errors.hpp"

namespace becoct::units {

double atom_mass(int nucleons) {
  if (nucleons <= 0) throw InvalidArgument("atom_mass: nucleon number must be positive");
  return nucleons * nucleon_mass_in_units();
}

}  // namespace becoct::units
