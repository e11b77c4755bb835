#pragma once

#include <stdexcept>
#include <string>

namespace repstab {

/// Failure categories. The CLI maps these onto its exit-code contract.
enum class errc {
  validation,      // bad input data or arguments
  dimension,       // shape mismatch / non-square
  contract,        // precondition violated (non-Hermitian, D(1) != 0, ...)
  not_normal,      // commutator defect above tolerance
  singular,        // (near-)singular operator where invertibility is required
  cluster_empty,   // quasimode window contains no eigenvalue
  chain_break,     // eigenvalue chain could not be continued
  inconsistency,   // dimension / integrality checks failed (orphan eigenvalues)
  divergence,      // iteration failed to converge
  reducibility,    // almost-Casimir singular: common invariant subspace
  not_equivalent,  // no intertwiner to tolerance
  mode_unsupported,// refined relations not satisfied for the requested mode
  resolution,      // quadrature grid too coarse
  io,              // file format / parse errors
};

class Error : public std::runtime_error {
public:
  Error(errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  errc code() const noexcept { return code_; }

private:
  errc code_;
};

[[noreturn]] void fail(errc code, const std::string& what);

} // namespace repstab
