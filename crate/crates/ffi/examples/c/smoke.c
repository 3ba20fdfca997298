/* Minimal C client: closed-form division, a short run and error handling. */
#include <math.h>
#include <stdio.h>
#include <stdlib.h>

#include "irsmec.h"

static int fail(const char *what, IrsmecStatus status) {
    fprintf(stderr, "%s failed (%d): %s\n", what, (int)status, irsmec_last_error());
    return 1;
}

int main(void) {
    double bits[2] = {1e6, 2e6};
    IrsmecRates rates = {{2e6, 2e6}, {1.5e6, 1.5e6}};
    IrsmecDivision division;
    IrsmecStatus status = irsmec_time_division_infinite(bits, &rates, &division);
    if (status != IRSMEC_STATUS_OK) return fail("time_division_infinite", status);
    if (fabs(division.lambda - 0.5) > 1e-15) return fail("lambda check", status);

    IrsmecConfig *config = NULL;
    status = irsmec_config_load("no-such-preset-or-file", &config);
    if (status == IRSMEC_STATUS_OK || config != NULL) return fail("bad preset", status);

    status = irsmec_config_load("asymmetric_intensity", &config);
    if (status != IRSMEC_STATUS_OK) return fail("config_load", status);
    irsmec_config_set_trials(config, 2);

    IrsmecResults *results = NULL;
    status = irsmec_run(config, &results);
    if (status != IRSMEC_STATUS_OK) return fail("run", status);

    size_t needed = 0;
    irsmec_results_to_csv(results, NULL, 0, &needed);
    char *csv = malloc(needed);
    status = irsmec_results_to_csv(results, csv, needed, &needed);
    if (status != IRSMEC_STATUS_OK) return fail("to_csv", status);

    IrsmecRow row;
    irsmec_results_row(results, 0, &row);
    printf("rows=%zu first=%s delay=%.6f\n", irsmec_results_len(results),
           irsmec_results_scheme(results, 0), row.mean_delay_s);

    free(csv);
    irsmec_results_free(results);
    irsmec_config_free(config);
    return 0;
}
