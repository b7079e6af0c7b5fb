/* Rewrites a kernel file with one cell scaled by a factor. */
#include <stdio.h>
#include <stdlib.h>

#include "vrt/vrt.h"

int main(int argc, char** argv) {
  vrt_kernel* k = NULL;
  double p = 0.0;
  char hash[65];
  if (argc != 7) {
    fprintf(stderr, "usage: %s <in> <out> <level> <iy> <ix> <factor>\n", argv[0]);
    return 2;
  }
  const size_t level = strtoul(argv[3], NULL, 10);
  const size_t iy = strtoul(argv[4], NULL, 10);
  const size_t ix = strtoul(argv[5], NULL, 10);
  vrt_status s = vrt_kernel_read(argv[1], &k);
  if (s == VRT_OK) s = vrt_kernel_prob(k, level, iy, ix, &p);
  if (s == VRT_OK) s = vrt_kernel_set_prob(k, level, iy, ix, p * strtod(argv[6], NULL));
  if (s == VRT_OK) s = vrt_kernel_write(k, argv[2], "corrupted", hash);
  vrt_kernel_free(k);
  if (s != VRT_OK) {
    fprintf(stderr, "%s: %s\n", vrt_status_name(s), vrt_last_error());
    return vrt_exit_code(s);
  }
  return 0;
}
