/* C interface to the radlab numerical radius library.
 *
 * Matrices are opaque handles created by the radlab_matrix_* constructors
 * and released with radlab_matrix_free. Every fallible call returns a
 * status code; on failure radlab_last_error() describes the cause. */

#ifndef RADLAB_H
#define RADLAB_H

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#define RADLAB_OK 0
#define RADLAB_ERR_NULL_POINTER 1
#define RADLAB_ERR_INVALID_ARGUMENT 2
#define RADLAB_ERR_PARSE 3
#define RADLAB_ERR_NUMERICAL 4
#define RADLAB_ERR_NOT_INVERTIBLE 5
#define RADLAB_ERR_HYPOTHESIS 6
#define RADLAB_ERR_COMPLEX_INPUT 7
#define RADLAB_ERR_BUFFER_TOO_SMALL 8
#define RADLAB_ERR_PANIC 9

typedef struct RadlabMatrix RadlabMatrix;

typedef struct RadlabBoundRecord {
    double lhs;
    double rhs;
    double slack;
    /* NaN when the bound has no explicit form. */
    double explicit_bound;
    /* Position in a chain of inequalities, -1 for a single inequality. */
    int32_t link;
} RadlabBoundRecord;

/* Message of the last failed call on this thread; empty if none. Valid
 * until the next failing call on the same thread. */
const char *radlab_last_error(void);

const char *radlab_version(void);

/* Row-major n*n real and imaginary parts; im may be NULL. */
int32_t radlab_matrix_new(size_t n, const double *re, const double *im, RadlabMatrix **out);

/* {"n": .., "re": [[..]], "im": [[..]]} */
int32_t radlab_matrix_from_json(const char *json, RadlabMatrix **out);

/* Matrix `index` of a seeded random family such as "ginibre". */
int32_t radlab_matrix_generate(const char *family, size_t n, uint64_t seed, uint64_t index,
                               RadlabMatrix **out);

void radlab_matrix_free(RadlabMatrix *m);

size_t radlab_matrix_dim(const RadlabMatrix *m);

int32_t radlab_matrix_entry(const RadlabMatrix *m, size_t i, size_t j, double *re, double *im);

/* Free the result with radlab_string_free. */
int32_t radlab_matrix_to_json(const RadlabMatrix *m, char **out);

void radlab_string_free(char *s);

/* theta may be NULL. */
int32_t radlab_numerical_radius(const RadlabMatrix *m, double *w, double *theta);

int32_t radlab_numerical_radius_ascent(const RadlabMatrix *m, size_t restarts, uint64_t seed,
                                       double *w);

int32_t radlab_op_norm(const RadlabMatrix *m, double *norm);

/* k boundary points of the field of values into re[0..k) and im[0..k). */
int32_t radlab_fov_boundary(const RadlabMatrix *m, size_t k, double *re, double *im);

/* Evaluates a bound ("th4", "eq4_aldolat", ...) on 1, 2 or 4 operands.
 * Writes up to `capacity` records and the total count into `written`;
 * returns RADLAB_ERR_BUFFER_TOO_SMALL when they do not fit. */
int32_t radlab_eval_bound(const char *bound, const RadlabMatrix *const *operands, size_t count,
                          double lambda, double alpha, double r, RadlabBoundRecord *records,
                          size_t capacity, size_t *written);

/* slack < -tol * max(1, |rhs|) */
bool radlab_is_violation(RadlabBoundRecord record, double tol);

#ifdef __cplusplus
}
#endif

#endif
