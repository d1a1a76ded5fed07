#include <stdio.h>
#include "cdperc.h"

int main(void) {
    double p = 0.0;
    if (cdperc_oracle_probability("path2", 1, 0.5, "edge:0", &p) != CDPERC_STATUS_OK) {
        fprintf(stderr, "%s\n", cdperc_last_error());
        return 1;
    }
    printf("P = %g\n", p);

    CdpercBoundReport *report = NULL;
    if (cdperc_verify_sweep("1.7", 10, 6, 100, 4000, &report) != CDPERC_STATUS_OK) {
        fprintf(stderr, "%s\n", cdperc_last_error());
        return 1;
    }
    size_t n = 0;
    bool pass = false;
    cdperc_bound_report_len(report, &n);
    cdperc_bound_report_all_pass(report, &pass);
    printf("%zu rows, %s\n", n, pass ? "all pass" : "failures");
    cdperc_bound_report_free(report);

    if (cdperc_sc_upper(0.1, &p) != CDPERC_STATUS_OK) {
        printf("error: %s\n", cdperc_last_error());
    }
    return 0;
}
