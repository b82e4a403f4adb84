#include <stdio.h>
#include <string.h>
#include "dfatoms.h"

int main(void) {
    double e = 0.0;
    if (df_oracle_sommerfeld(1.0, -1, 1, 137.035999084, &e) != DF_OK) return 10;
    if (e > -0.49999 || e < -0.50001) return 11;
    if (df_oracle_sommerfeld(200.0, -1, 1, 137.035999084, &e) != DF_SOLVER_ERROR) return 12;
    if (strlen(df_last_error_message()) == 0) return 13;

    const char *cfg = "{\"Z\":2,\"shells\":[{\"n\":1,\"kappa\":-1,\"w\":2}],\"grid\":{\"size\":200}}";
    DfReport *r = NULL;
    int code = df_run(cfg, "solve", &r);
    if (code != DF_OK || r == NULL) return 20;
    if (df_report_number(r, "/results/energy/shifted", &e) != DF_OK) return 21;
    if (e > -2.85 || e < -2.87) return 22;
    if (strstr(df_report_json(r), "dfatoms-report/1") == NULL) return 23;
    df_report_free(r);
    printf("ok %.10f\n", e);
    return 0;
}
