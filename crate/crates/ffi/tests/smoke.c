#include <stdio.h>
#include <string.h>
#include "qeuler.h"

static int fail(const char *what) {
    char *msg = qe_last_error_message();
    fprintf(stderr, "%s: %s\n", what, msg ? msg : "(no message)");
    qe_string_free(msg);
    return 1;
}

int main(void) {
    QeContext *ctx = NULL;
    if (qe_context_new(3, "1+p", 4, &ctx) != QE_STATUS_OK) return fail("context");

    char *s = NULL;
    if (qe_euler_number(ctx, 1, &s) != QE_STATUS_OK) return fail("euler");
    if (strcmp(s, "(-q)/(1 + q)") != 0) return fail("euler value");
    qe_string_free(s);

    if (qe_euler_number_at(ctx, 3, "1", &s) != QE_STATUS_OK) return fail("euler at");
    if (strcmp(s, "1/4") != 0) return fail("euler at value");
    qe_string_free(s);

    QeVerdict v;
    bool oracles = false;
    if (qe_verify(ctx, "THM4", 1, 1, &v, &oracles) != QE_STATUS_OK) return fail("verify");
    if (v != QE_VERDICT_HOLDS || !oracles) return fail("verify verdict");

    QeReport *r = NULL;
    if (qe_verify_grid(ctx, "EQ6", 0, 2, 0, 2, &r) != QE_STATUS_OK) return fail("grid");
    if (qe_report_blocking_failures(r) != 0) return fail("grid failures");
    if (qe_report_json(r, &s) != QE_STATUS_OK) return fail("json");
    if (strstr(s, "qeuler-report/1") == NULL) return fail("json schema");
    qe_string_free(s);
    qe_report_free(r);

    int64_t achieved = 0;
    if (qe_integrate(ctx, QE_MEASURE_FERMIONIC, 1, NULL, &s, &achieved) != QE_STATUS_OK) return fail("integrate");
    if (achieved != 4) return fail("integrate precision");
    qe_string_free(s);

    if (qe_verify(ctx, "NOPE", 1, 1, &v, NULL) != QE_STATUS_INVALID_ARGUMENT) return fail("bad id status");
    qe_context_free(ctx);
    puts("ok");
    return 0;
}
