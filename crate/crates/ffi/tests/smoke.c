/* Licensed under the Apache License, Version 2.0. */
#include <stdio.h>
#include "spanning_embed.h"

int main(void) {
    SeGraph *host = NULL, *target = NULL;
    SeEmbedding *emb = NULL;
    size_t k4[] = {0, 1, 0, 2, 0, 3, 1, 2, 1, 3, 2, 3};
    if (se_sample_gnp(40, 1.0, 1, &host) != SE_OK) return 1;
    if (se_graph_new(4, k4, 6, &target) != SE_OK) return 2;
    if (se_embed(host, target, SE_DIRECT, 1, 3, 1.0, 7, &emb) != SE_OK) return 3;
    size_t map[4];
    if (se_embedding_copy(emb, map, 4) != SE_OK) return 4;
    if (se_graph_new(3, k4, 1, NULL) != SE_NULL_POINTER || se_last_error() == NULL) return 5;
    printf("%zu %zu %zu %zu\n", map[0], map[1], map[2], map[3]);
    se_embedding_free(emb);
    se_graph_free(target);
    se_graph_free(host);
    return 0;
}
