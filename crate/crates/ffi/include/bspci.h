#ifndef BSPCI_H
#define BSPCI_H

#include <stddef.h>
#include <stdint.h>

/*
 Status codes returned by every fallible function.
 */
typedef enum BspciStatus {
  BSPCI_STATUS_OK = 0,
  BSPCI_STATUS_NULL_POINTER = 1,
  BSPCI_STATUS_INVALID_UTF8 = 2,
  /*
   Bad key, value or combination of settings.
   */
  BSPCI_STATUS_CONFIG = 3,
  /*
   A numerical stage failed (factorization, eigensolver, trace check).
   */
  BSPCI_STATUS_NUMERICAL = 4,
  /*
   The Hamiltonian would exceed the memory budget.
   */
  BSPCI_STATUS_MEMORY_BUDGET = 5,
  /*
   Index past the end of an array.
   */
  BSPCI_STATUS_OUT_OF_RANGE = 6,
  /*
   A Rust panic was caught at the boundary.
   */
  BSPCI_STATUS_PANIC = 7,
} BspciStatus;

/*
 Run settings. Create with [`bspci_config_new`], free with
 [`bspci_config_free`].
 */
typedef struct BspciConfig BspciConfig;

/*
 Result of one solve. Free with [`bspci_report_free`].
 */
typedef struct BspciReport BspciReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Library version as a static NUL-terminated string.
 */
const char *bspci_version(void);

/*
 Message of the last failed call on this thread, or an empty string.
 The pointer stays valid until the next call into the library on the
 same thread.
 */
const char *bspci_last_error_message(void);

/*
 New config holding the defaults (He ground state, `l_max = 5`,
 `n_max = 40`).
 */
struct BspciConfig *bspci_config_new(void);

/*
 # Safety
 `config` must come from [`bspci_config_new`] and not be freed already.
 NULL is ignored.
 */
void bspci_config_free(struct BspciConfig *config);

/*
 Sets one key, using the same names and value syntax as the CLI config
 file (`z`, `state`, `lmax`, `nmax`, `rmax`, `order`, ...).

 # Safety
 `config` must be a live handle; `key` and `value` must be NUL-terminated.
 */
enum BspciStatus bspci_config_set(struct BspciConfig *config, const char *key, const char *value);

/*
 Solves the configured state. On success `*out` receives a new report.

 # Safety
 `config` must be a live handle and `out` a valid pointer.
 */
enum BspciStatus bspci_solve(const struct BspciConfig *config, struct BspciReport **out);

/*
 # Safety
 `report` must come from [`bspci_solve`] and not be freed already. NULL
 is ignored.
 */
void bspci_report_free(struct BspciReport *report);

/*
 Total energy in hartree.

 # Safety
 `report` must be a live handle and `out` a valid pointer.
 */
enum BspciStatus bspci_report_energy(const struct BspciReport *report, double *out);

/*
 Linear entropy `1 - Tr ρ²`.

 # Safety
 `report` must be a live handle and `out` a valid pointer.
 */
enum BspciStatus bspci_report_linear_entropy(const struct BspciReport *report, double *out);

/*
 Von Neumann entropy in bits.

 # Safety
 `report` must be a live handle and `out` a valid pointer.
 */
enum BspciStatus bspci_report_von_neumann_entropy(const struct BspciReport *report, double *out);

/*
 Spin-weighted entanglement of the `S_z = 0` component.

 # Safety
 `report` must be a live handle and `out` a valid pointer.
 */
enum BspciStatus bspci_report_xi(const struct BspciReport *report, double *out);

/*
 `Tr ρ²` of the normalized one-particle density matrix.

 # Safety
 `report` must be a live handle and `out` a valid pointer.
 */
enum BspciStatus bspci_report_purity(const struct BspciReport *report, double *out);

/*
 Number of configurations in the CI expansion.

 # Safety
 `report` must be a live handle and `out` a valid pointer.
 */
enum BspciStatus bspci_report_dimension(const struct BspciReport *report, size_t *out);

/*
 Number of distinct occupation numbers (each with its degeneracy).

 # Safety
 `report` must be a live handle and `out` a valid pointer.
 */
enum BspciStatus bspci_report_occupation_count(const struct BspciReport *report, size_t *out);

/*
 Occupation `index`, ordered by `l` and then by decreasing eigenvalue:
 angular momentum, eigenvalue and degeneracy `2l+1`. Any of the output
 pointers may be NULL.

 # Safety
 `report` must be a live handle; non-NULL outputs must be valid.
 */
enum BspciStatus bspci_report_occupation(const struct BspciReport *report,
                                         size_t index,
                                         uint32_t *l,
                                         double *lambda,
                                         uint32_t *degeneracy);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BSPCI_H */
