import time
import requests

URL = "https://example.org/fn"
start = time.time()
for i in range(1000):
    requests.get(URL)
elapsed = time.time() - start
print(elapsed / 1000)
