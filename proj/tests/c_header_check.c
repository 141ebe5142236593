/* The public header must compile as C and the library must link from C. */

#include "srsvd/srsvd.h"

#include <stdio.h>

int main(void) {
  const double data[6] = {1, 2, 3, 4, 5, 7};
  srsvd_matrix* m = NULL;
  srsvd_result* r = NULL;
  srsvd_params p = {1, 2, 0, 0};
  double sigma = 0.0;

  if (srsvd_matrix_from_dense(2, 3, data, &m) != SRSVD_OK) return 1;
  if (srsvd_factorize(m, SRSVD_SHIFT_MEAN, NULL, 0, &p, &r) != SRSVD_OK) {
    fprintf(stderr, "%s\n", srsvd_last_error());
    return 1;
  }
  if (srsvd_result_sigma(r, &sigma, 1) != SRSVD_OK || !(sigma > 0.0)) return 1;
  srsvd_result_free(r);
  srsvd_matrix_free(m);
  return 0;
}
