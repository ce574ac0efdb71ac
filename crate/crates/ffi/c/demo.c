/* cc -I crates/ffi/include crates/ffi/c/demo.c target/release/libqsink_ffi.a -lm -lpthread -ldl -o demo */
#include <stdio.h>

#include "qsink.h"

static int check(QsinkStatus st, const char *what) {
    if (st != QSINK_STATUS_OK) {
        const char *msg = qsink_last_error_message();
        fprintf(stderr, "%s failed (%d): %s\n", what, (int)st, msg ? msg : "?");
        return 1;
    }
    return 0;
}

int main(void) {
    QsinkChannel *line = NULL;
    if (check(qsink_channel_new(1.0, 5.0, 1.0, &line), "channel")) return 1;

    QsinkLifetime life;
    if (check(qsink_max_lifetime(line, line, 0.0, &life), "lifetime")) return 1;

    QsinkOptimalState opt;
    if (check(qsink_optimal_state(line, line, &opt), "optimal state")) return 1;

    printf("qsink %s\n", qsink_version());
    printf("tau = %.12f\n", life.tau);
    printf("psi = (%.8f, %.8f, %.8f, %.8f)\n", opt.psi_re[0], opt.psi_re[1], opt.psi_re[2], opt.psi_re[3]);

    QsinkChannel *bad = NULL;
    QsinkStatus st = qsink_channel_new(-1.0, 0.0, 0.0, &bad);
    printf("negative rate -> status %d: %s\n", (int)st, qsink_last_error_message());

    qsink_channel_free(line);
    return 0;
}
