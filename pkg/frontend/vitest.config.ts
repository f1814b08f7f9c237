import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    environment: "happy-dom",
    include: ["test/**/*.test.ts"],
    // the e2e file spawns the python service and waits for it to come up
    testTimeout: 60000,
    hookTimeout: 60000,
  },
});
