#include "fstkit/core.hpp"

namespace fst {

Tolerances& tolerances() {
  static Tolerances t;
  return t;
}

}  // namespace fst
