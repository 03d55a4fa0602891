/* The public header must compile as C and the library must link from C. */
#include <stdio.h>

#include "qbattery/qbattery.h"

int main(void) {
  qb_engine* e = NULL;
  double v = 0.0;
  int region = 0;
  const char* label = NULL;
  if (qb_engine_create_ising(0.8, 0.7, 8, &e) != QB_OK) return 1;
  if (qb_engine_energy(e, 1.0, &v) != QB_OK) return 1;
  qb_engine_destroy(e);
  if (qb_classify_phase(1.0, 0.5, &region, &label) != QB_OK || region != 1) return 1;
  printf("%s %s\n", qb_version(), label);
  return 0;
}
