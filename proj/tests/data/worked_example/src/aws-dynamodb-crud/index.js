const AWS = require("aws-sdk");
const db = new AWS.DynamoDB.DocumentClient();

exports.handler = async (event) => {
  const body = JSON.parse(event.body || "{}");
  if (event.httpMethod === "POST") {
    await db.put({ TableName: process.env.TABLE, Item: body }).promise();
    return { statusCode: 201, body: JSON.stringify(body) };
  }
  const res = await db.scan({ TableName: process.env.TABLE }).promise();
  return { statusCode: 200, body: JSON.stringify(res.Items) };
};
