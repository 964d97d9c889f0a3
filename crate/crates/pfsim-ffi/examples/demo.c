/* Minimal caller of the C interface.
 *
 * Build from the workspace root after `cargo build -p pfsim-ffi`:
 *
 *   gcc examples/demo.c -I include \
 *       ../../target/debug/libpfsim_ffi.a -lm -lpthread -ldl -o demo
 */

#include <assert.h>
#include <stdio.h>

#include "pfsim.h"

int main(void) {
  printf("pfsim %s\n", pf_version());

  PfSubspace *s = NULL;
  if (pf_subspace_new(3, 1.0, 1.0, 1.0, 1e-3, 1e-3, &s) != PF_STATUS_OK) {
    fprintf(stderr, "subspace: %s\n", pf_last_error());
    return 1;
  }
  uintptr_t dim = 0;
  assert(pf_subspace_dim(s, &dim) == PF_STATUS_OK);
  assert(pf_subspace_verify(s) == PF_STATUS_OK);
  printf("order 3 subspace: dim %zu, algebra verified\n", (size_t)dim);
  pf_subspace_free(s);

  PfTrajectory *t = NULL;
  if (pf_simulate(2, 1.0, 1.0, 1.0, 1e-3, 1e-3, 0.0, 64, &t) != PF_STATUS_OK) {
    fprintf(stderr, "simulate: %s\n", pf_last_error());
    return 1;
  }
  uintptr_t len = 0;
  assert(pf_trajectory_len(t, &len) == PF_STATUS_OK);
  double inversion[64];
  assert(pf_trajectory_column(t, 4, inversion, len) == PF_STATUS_OK);
  printf("trajectory of %zu points, inversion starts at %+.6f\n",
         (size_t)len, inversion[0]);
  pf_trajectory_free(t);

  PfRevival rev;
  if (pf_revival(25, 1.0, 1.0, 1.0, 1e-3, 1e-3, 0.0, 4000, &rev) != PF_STATUS_OK) {
    fprintf(stderr, "revival: %s\n", pf_last_error());
    return 1;
  }
  printf("order 25: collapse at %.0f, revival at %.0f (predicted %.0f)\n",
         rev.collapse_time, rev.revival_time, rev.predicted_homogeneous);
  return 0;
}
