/* C interface to the relative-rank library.
 *
 * All functions return rr_status unless the result is a plain scalar. On
 * RR_OK the output parameters are valid; on any error they are untouched and
 * rr_last_error() carries a message for the calling thread. Strings returned
 * through char** are heap-allocated and must be released with rr_string_free.
 */
#ifndef RELRANK_H
#define RELRANK_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define RELRANK_API __declspec(dllexport)
#else
#define RELRANK_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum rr_status {
  RR_OK = 0,
  RR_EINVAL = 1,    /* invalid argument or configuration */
  RR_EDOMAIN = 2,   /* parameters outside the mathematical domain */
  RR_ESTRUCT = 3,   /* malformed data structure */
  RR_ERESOURCE = 4, /* work size past a configured limit */
  RR_EPARSE = 5,    /* unparseable input bytes */
  RR_EIO = 6,       /* filesystem failure */
  RR_EINTERNAL = 7
} rr_status;

typedef struct rr_cloud rr_cloud;
typedef struct rr_rank rr_rank;

RELRANK_API const char* rr_version(void);

/* Message for the last failing call on this thread; empty string if none. */
RELRANK_API const char* rr_last_error(void);

RELRANK_API void rr_string_free(char* s);

/* Point clouds ---------------------------------------------------------- */

/* coords is n*dim doubles, row-major. labels may be NULL. */
RELRANK_API rr_status rr_cloud_create(const double* coords, size_t n, size_t dim,
                                      const int32_t* labels, rr_cloud** out);

/* Images and labels in the standard byte formats used for digit datasets;
 * digits selects which classes to keep, NULL or count 0 keeps all. */
RELRANK_API rr_status rr_cloud_from_digits(const char* images_path,
                                           const char* labels_path,
                                           const int* digits, size_t digit_count,
                                           rr_cloud** out);

/* Noisy circle in the plane: radius plus per-coordinate gaussian noise. */
RELRANK_API rr_status rr_cloud_circle(size_t n, double radius, double noise_sigma,
                                      uint64_t seed, rr_cloud** out);

RELRANK_API size_t rr_cloud_size(const rr_cloud* cloud);
RELRANK_API size_t rr_cloud_dim(const rr_cloud* cloud);

/* Copies point i into out (dim doubles). */
RELRANK_API rr_status rr_cloud_point(const rr_cloud* cloud, size_t i, double* out);

RELRANK_API void rr_cloud_free(rr_cloud* cloud);

/* Averaged stable rank -------------------------------------------------- */

/* config_json describes the filter, distribution, sampling, degree and
 * contour; see the pipeline documentation for the schema. */
RELRANK_API rr_status rr_pipeline_run(const rr_cloud* reference,
                                      const char* config_json, rr_rank** out);

/* Evaluate the rank function at t (t >= 0). */
RELRANK_API rr_status rr_rank_value(const rr_rank* rank, double t, double* out);

/* Number of breakpoints. */
RELRANK_API size_t rr_rank_breaks(const rr_rank* rank);

/* Copies breakpoints and the value on [break[i], break[i+1]) into arrays of
 * length rr_rank_breaks()+1; breaks[0] is always 0. */
RELRANK_API rr_status rr_rank_data(const rr_rank* rank, double* breaks,
                                   double* values);

RELRANK_API rr_status rr_rank_l1(const rr_rank* a, const rr_rank* b, double* out);

/* Inner product of the two rank functions over [0, cap]. */
RELRANK_API rr_status rr_rank_l2(const rr_rank* a, const rr_rank* b, double cap,
                                 double* out);

RELRANK_API rr_status rr_rank_csv(const rr_rank* rank, char** out);
RELRANK_API rr_status rr_rank_json(const rr_rank* rank, char** out);

RELRANK_API void rr_rank_free(rr_rank* rank);

/* Experiments ----------------------------------------------------------- */

/* kind is "global", "plane", or "relative". Writes csv/json/svg outputs
 * into out_dir (formats is a comma-separated subset, e.g. "csv,json,svg");
 * summary_json receives the run manifest. */
RELRANK_API rr_status rr_experiment(const char* kind, const char* config_json,
                                    const char* out_dir, const char* formats,
                                    char** summary_json);

/* Writes a synthetic handwritten-digit dataset (train and test splits in
 * the standard byte formats) into dir. */
RELRANK_API rr_status rr_synth_digits(const char* dir, uint64_t seed);

/* Validates the train/test pairs in dir by parsing them fully; info_json
 * receives {"train": n, "test": m, "dim": d} on success. */
RELRANK_API rr_status rr_dataset_info(const char* dir, char** info_json);

#ifdef __cplusplus
}
#endif

#endif /* RELRANK_H */
