// Reference implementations used to cross-check the syntax module.
#pragma once

#include <set>
#include <string>

#include "gradpi/syntax.hpp"

namespace gradpi::testing
{

/// Nameless form: bound occurrences become the distance to their binder,
/// free occurrences keep their name. Written independently of the library.
std::string debruijn(const CastProcess& p);
std::string debruijn(const SurfaceProcess& p);

inline bool oracle_alpha_equal(const CastProcess& p, const CastProcess& q) { return debruijn(p) == debruijn(q); }
inline bool oracle_alpha_equal(const SurfaceProcess& p, const SurfaceProcess& q)
{
  return debruijn(p) == debruijn(q);
}

/// Free names by an occurrence walk that carries the set of enclosing binders.
std::set<Name> oracle_free_names(const CastProcess& p);

}  // namespace gradpi::testing
