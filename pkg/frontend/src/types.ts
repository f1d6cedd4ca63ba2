import { z } from "zod";

export const LanguageSchema = z.object({
  code: z.string(),
  family: z.string(),
  script: z.string(),
  mono_mrr: z.number(),
  donation: z.number(),
  recipience: z.number(),
  blood_type: z.enum(["O", "ABplus", "Universal", "Isolate"]),
  wals: z.record(z.string()),
});

export const EdgeSchema = z.object({
  source: z.string(),
  target: z.string(),
  ft: z.number(),
  ft_percent: z.number(),
  bin: z.enum(["Negative", "Neutral", "Positive", "VeryPositive"]),
});

export const GraphDocSchema = z.object({
  languages: z.array(LanguageSchema),
  edges: z.array(EdgeSchema),
  meta: z.object({
    provenance: z.string(),
    seeds: z.array(z.number()),
    regime: z.string().nullable(),
    created_at: z.string(),
    conventions: z.record(z.unknown()),
  }),
});

export const WhatIfResponseSchema = z.object({
  donors: z.array(z.string()),
  mode: z.string(),
  k: z.number(),
  min_families: z.number(),
  exclude: z.array(z.string()),
  seed: z.number(),
  donation_sum: z.number(),
  per_language: z.record(
    z.object({
      donation: z.number(),
      recipience: z.number(),
      family: z.string(),
      script: z.string(),
    })
  ),
});

export const ServiceErrorSchema = z.object({
  code: z.string(),
  message: z.string(),
});

export type LanguageDoc = z.infer<typeof LanguageSchema>;
export type EdgeDoc = z.infer<typeof EdgeSchema>;
export type GraphDoc = z.infer<typeof GraphDocSchema>;
export type WhatIfResponse = z.infer<typeof WhatIfResponseSchema>;
export type ServiceError = z.infer<typeof ServiceErrorSchema>;

export interface WhatIfParams {
  k?: number;
  mode?: string;
  min_families?: number;
  exclude?: string[];
  seed?: number;
  force_include?: string[];
}
