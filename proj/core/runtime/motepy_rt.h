/* Copyright 2026 The MotePy Authors
 * SPDX-License-Identifier: Apache-2.0
 *
 * Support code included by every generated translation unit. Plain C99,
 * header only.
 */
#ifndef MOTEPY_RT_H
#define MOTEPY_RT_H

#include <errno.h>
#include <stdint.h>
#include <stdlib.h>

typedef struct {
  int present;              /* 0: no count given, run forever */
  unsigned long long value; /* iterations when present */
} mp_iters;

/* Parses the optional iteration count in argv[1]. Returns 0 on success and
 * -1 for extra arguments, signs, empty strings or trailing garbage. */
static inline int mp_parse_iters(int argc, char **argv, mp_iters *out)
{
  const char *s;
  char *end = NULL;
  unsigned long long v;

  out->present = 0;
  out->value = 0;
  if (argc <= 1 || argv == NULL)
    return 0;
  if (argc > 2)
    return -1;
  s = argv[1];
  if (s == NULL || *s < '0' || *s > '9')
    return -1;
  errno = 0;
  v = strtoull(s, &end, 10);
  if (errno != 0 || end == NULL || *end != '\0')
    return -1;
  out->present = 1;
  out->value = v;
  return 0;
}

#define MP_CAT_(a, b) a##b
#define MP_CAT(a, b) MP_CAT_(a, b)
#define MP_SECOND_(a, b, ...) b
#define MP_SECOND(...) MP_SECOND_(__VA_ARGS__, )
#define MP_IS_ZERO_PROBE_0 ~, 1
#define MP_IS_ZERO(n) MP_SECOND(MP_CAT(MP_IS_ZERO_PROBE_, n), 0)

#define MP_ARENA_DEF_1(size)
#define MP_ARENA_DEF_0(size)         \
  static union {                     \
    unsigned char bytes[size];       \
    uint64_t align_u64;              \
    double align_double;             \
  } mp_arena_storage;

/* Static arena of `size` bytes, 8-byte aligned, internal linkage. Expands to
 * nothing for a literal 0. Use without a trailing semicolon. */
#define MP_DEFINE_ARENA(size) MP_CAT(MP_ARENA_DEF_, MP_IS_ZERO(size))(size)

#define MP_ARENA_BASE (mp_arena_storage.bytes)

#endif /* MOTEPY_RT_H */
