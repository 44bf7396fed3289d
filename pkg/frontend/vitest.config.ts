import { configDefaults, defineConfig } from "vitest/config";

// The parity suite needs the Python package installed and spawns its search
// service; opt in with PARITY=1 (npm run test:parity).
export default defineConfig({
  test: {
    include: ["test/**/*.test.ts"],
    exclude: process.env.PARITY
      ? [...configDefaults.exclude]
      : [...configDefaults.exclude, "test/parity.test.ts"],
  },
});
