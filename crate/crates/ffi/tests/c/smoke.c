#include <stdio.h>
#include <string.h>

#include "bigrade.h"

#define CHECK(cond)                                                   \
  do {                                                                \
    if (!(cond)) {                                                    \
      const char *msg = bigrade_last_error_message();                 \
      fprintf(stderr, "line %d: %s (%s)\n", __LINE__, #cond,          \
              msg ? msg : "no error");                                \
      return 1;                                                       \
    }                                                                 \
  } while (0)

int main(void) {
  BigradeOptions opts = bigrade_options_default();
  opts.r_max = 5;
  opts.s_max = 5;
  BigradeSession *s = NULL;
  CHECK(bigrade_session_new("x^2, x*y, y^2", "x^2, y^2", &opts, &s) == BIGRADE_STATUS_OK);

  BigradeCoefficients c;
  CHECK(bigrade_coefficients(s, &c) == BIGRADE_STATUS_OK);
  CHECK(c.e20 == 4 && c.e11 == 4 && c.e02 == 4 && c.e10 == 1 && c.e01 == 1 && c.e00 == 0);

  size_t n = 0;
  CHECK(bigrade_length_table(s, NULL, 0, &n) == BIGRADE_STATUS_OK && n == 36);
  uint64_t table[36];
  CHECK(bigrade_length_table(s, table, n, &n) == BIGRADE_STATUS_OK);
  CHECK(table[1 * 6 + 1] == 10);

  BigradeVerdict v;
  CHECK(bigrade_classify_h2(s, 0, 0, &v) == BIGRADE_STATUS_OK);
  CHECK(v.kind == BIGRADE_VERDICT_KIND_INFINITE_DETECTED && v.value == 1);

  char *json = NULL;
  CHECK(bigrade_coefficients_json(s, &json) == BIGRADE_STATUS_OK);
  CHECK(strstr(json, "\"bhattacharya\"") != NULL);
  bigrade_string_free(json);

  uint64_t len = 0;
  CHECK(bigrade_length(s, 6, 0, &len) == BIGRADE_STATUS_OUT_OF_RANGE);
  CHECK(bigrade_last_error_message() != NULL);
  bigrade_session_free(s);

  BigradeSession *bad = NULL;
  CHECK(bigrade_session_new("x*y", "x, y", NULL, &bad) == BIGRADE_STATUS_INVALID_INPUT);
  CHECK(bad == NULL);

  printf("ok %s\n", bigrade_version());
  return 0;
}
