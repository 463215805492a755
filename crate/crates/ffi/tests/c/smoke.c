#include "geoap.h"
#include <stdio.h>
int main(void) {
  GeoapMatrix *m = NULL; uint64_t j = 0; char *s = NULL;
  if (geoap_matrix_parse("2,1,1,1", &m) != GEOAP_STATUS_OK) return 1;
  if (geoap_order_p(m, 6, &j) != GEOAP_STATUS_OK || j != 6) return 2;
  if (geoap_trace_to_length("3", 25, &s) != GEOAP_STATUS_OK) return 3;
  printf("%s\n", s);
  geoap_string_free(s); geoap_matrix_free(m);
  return 0;
}
