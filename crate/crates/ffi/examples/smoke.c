#include <stdio.h>
#include <string.h>

#include "caialg.h"

#define CHECK(call)                                                          \
    do {                                                                     \
        CaialgStatus st_ = (call);                                           \
        if (st_ != CAIALG_STATUS_OK) {                                       \
            fprintf(stderr, "%s -> %d: %s\n", #call, (int)st_, caialg_last_error()); \
            return 1;                                                        \
        }                                                                    \
    } while (0)

int main(void) {
    double m[4] = {3.0, 0.0, 0.0, -4.0};
    double norm = 0.0, rho = 0.0;
    CHECK(caialg_op_norm(m, NULL, 2, &norm));
    CHECK(caialg_spectral_radius(m, NULL, 2, &rho));
    printf("op_norm %.6f spectral_radius %.6f\n", norm, rho);

    double u[16];
    size_t mu = 0;
    CHECK(caialg_cai_block(4, 2, u, 16, &mu));
    printf("u_{4,2}[0][2] %.6f mu %zu\n", u[2], mu);

    CaialgParams *params = NULL;
    CHECK(caialg_params_new_linear(1.0, 20, &params));
    double p = 0.0;
    CHECK(caialg_p_norm(params, "{\"type\": \"cai_unit\", \"k\": 3}", 1, 20, &p));
    printf("p(u_3) %.6f\n", p);
    caialg_params_free(params);

    if (caialg_params_new_linear(0.0, 20, &params) != CAIALG_STATUS_RANGE &&
        caialg_params_new_linear(0.0, 20, &params) != CAIALG_STATUS_INVALID_ARGUMENT) {
        fprintf(stderr, "offset 0 accepted\n");
        return 1;
    }

    CaialgReportSet *set = NULL;
    CHECK(caialg_run_suite("{\"n_max\": 20, \"lemmas\": [\"minimal_idempotents\", \"cai_mutual\"]}", &set));
    size_t len = 0;
    int exit_code = -1;
    CHECK(caialg_report_set_len(set, &len));
    CHECK(caialg_report_set_exit_code(set, &exit_code));
    for (size_t i = 0; i < len; i++) {
        CaialgReportView v;
        char *id = NULL;
        CHECK(caialg_report_get(set, i, &v));
        CHECK(caialg_report_lemma_id(set, i, &id));
        printf("%s %s\n", id, v.pass ? "pass" : "fail");
        caialg_string_free(id);
    }
    char *json = NULL;
    CHECK(caialg_report_set_render(set, 0, &json));
    printf("json bytes %zu exit %d\n", strlen(json), exit_code);
    caialg_string_free(json);
    caialg_report_set_free(set);
    return exit_code;
}
