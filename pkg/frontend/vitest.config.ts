import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    globalSetup: ["test/serviceSetup.ts"],
    testTimeout: 20000,
    hookTimeout: 60000,
  },
});
